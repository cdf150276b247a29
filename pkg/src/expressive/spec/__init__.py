"""Specs: traits with test rules and cases, method tables, and an interpreted executor."""

from importlib import resources

from .compiler import (
    CompiledProgram,
    CompileOptions,
    Contractor,
    bind_implementer,
    build_program,
    check_references,
    compile_specs,
    dispatch,
    extract_contractor,
    run_tests,
)
from .implementers import Implementer, ImplementerRegistry, default_registry
from .interp import Runtime, SpecObject, TestReport, TestResult, View
from .model import (
    AbstractCall,
    AccessViolation,
    AccessWidening,
    CastOutsideParentTable,
    CompileFailure,
    CyclicInheritance,
    MethodEntry,
    MethodSignature,
    MissingImplementerMember,
    NoSuchImplementer,
    NonBoolCondition,
    SpecDefinition,
    SpecError,
    SpecSyntaxError,
    UndefinedName,
)
from .parser import parse_specs
from .tables import TableSet, build_tables, chain_lookup


def fixture(name: str) -> str:
    """Text of a packaged spec file, e.g. ``fixture("ispec_bool")``."""
    return resources.files(__name__).joinpath("fixtures", f"{name}.spec").read_text(encoding="utf-8")


__all__ = [
    "AbstractCall", "AccessViolation", "AccessWidening", "CastOutsideParentTable",
    "CompileFailure", "CompileOptions", "CompiledProgram", "Contractor", "CyclicInheritance",
    "Implementer", "ImplementerRegistry", "MethodEntry", "MethodSignature",
    "MissingImplementerMember", "NoSuchImplementer", "NonBoolCondition", "Runtime",
    "SpecDefinition", "SpecError", "SpecObject", "SpecSyntaxError", "TableSet", "TestReport",
    "TestResult", "UndefinedName", "View", "bind_implementer", "build_program", "build_tables",
    "chain_lookup", "check_references", "compile_specs", "default_registry", "dispatch",
    "extract_contractor", "fixture", "parse_specs", "run_tests",
]
