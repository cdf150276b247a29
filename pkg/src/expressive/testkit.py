"""A small log-based test harness: categories, checks, comments and a summary.

A check that fails records where it was called from; the caller decides
whether to continue based on the returned flag.
"""

from __future__ import annotations

import inspect
import os
from dataclasses import dataclass, field
from typing import Callable

DEFAULT_CATEGORY = "default"


@dataclass
class CaseResult:
    name: str
    passed: bool
    context: str | None = None


@dataclass
class Category:
    name: str
    origin: str
    cases: list[CaseResult] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.cases)

    @property
    def failed(self) -> int:
        return len(self.cases) - self.passed


def caller_context() -> str:
    """``file:line`` of the nearest frame outside this module."""
    frame = inspect.currentframe()
    try:
        while frame is not None and frame.f_code.co_filename == __file__:
            frame = frame.f_back
        if frame is None:
            return "<unknown>"
        return f"{os.path.basename(frame.f_code.co_filename)}:{frame.f_lineno}"
    finally:
        del frame


@dataclass
class TestLog:
    categories: list[Category] = field(default_factory=list)
    capture: Callable[[], str] = field(default=caller_context, repr=False)

    __test__ = False  # not a pytest class

    def _current(self) -> Category:
        if not self.categories:
            self.categories.append(Category(DEFAULT_CATEGORY, "<implicit>"))
        return self.categories[-1]

    def category(self, name: str) -> None:
        self.categories.append(Category(name, self.capture()))

    def check(self, name: str, outcome: bool) -> bool:
        ok = bool(outcome)
        self._current().cases.append(CaseResult(name, ok, None if ok else self.capture()))
        return ok

    def comment(self, text: str) -> None:
        self._current().comments.append(text)

    def merge(self, other: "TestLog") -> None:
        self.categories.extend(other.categories)

    @property
    def totals(self) -> tuple[int, int]:
        return (sum(c.passed for c in self.categories),
                sum(c.failed for c in self.categories))

    def summary(self) -> str:
        lines = []
        for c in self.categories:
            lines.append(f"[{c.name}] {c.passed}/{len(c.cases)} passed  ({c.origin})")
            for case in c.cases:
                if not case.passed:
                    lines.append(f"  FAIL {case.name} at {case.context}")
            for text in c.comments:
                lines.append(f"  # {text}")
        p, f = self.totals
        lines.append(f"{p} passed, {f} failed")
        lines.append(f"#summary {p} {f}")
        return "\n".join(lines) + "\n"


def category(log: TestLog, name: str) -> None:
    log.category(name)


def check(log: TestLog, name: str, outcome: bool) -> bool:
    return log.check(name, outcome)


def summary(log: TestLog) -> str:
    return log.summary()
