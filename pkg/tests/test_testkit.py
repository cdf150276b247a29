from hypothesis import given
from hypothesis import strategies as st

from expressive.testkit import TestLog, category, check, summary


def test_checks_and_summary():
    """Checks tally per category and failures carry the call site."""
    log = TestLog()
    category(log, "numbers")
    assert check(log, "one", 1 == 1)
    assert not check(log, "two", 1 == 2)
    log.comment("note")
    text = summary(log)
    assert "[numbers] 1/2 passed" in text
    assert "FAIL two at test_testkit.py:" in text
    assert "# note" in text
    assert text.endswith("#summary 1 1\n")


def test_implicit_category_and_merge():
    """A check before any category goes to the default one; logs merge."""
    a, b = TestLog(), TestLog()
    a.check("x", True)
    b.category("other")
    b.check("y", False)
    a.merge(b)
    assert [c.name for c in a.categories] == ["default", "other"]
    assert a.totals == (1, 1)


@given(st.lists(st.tuples(st.sampled_from("abc"), st.booleans()), max_size=30))
def test_totals_match_outcomes(outcomes):
    """Totals count every check exactly once."""
    log = TestLog(capture=lambda: "here")
    for cat, ok in outcomes:
        log.category(cat)
        log.check(cat, ok)
    passed = sum(ok for _, ok in outcomes)
    assert log.totals == (passed, len(outcomes) - passed)
    assert f"#summary {passed} {len(outcomes) - passed}" in log.summary()
