"""
Tests for the exception hierarchy
"""

import pytest

from bergman_lab.errors import (
    AdmissibilityError, ArchiveError, ArgumentError, ConditioningError, ContractError, DomainError, LabError,
    NumericError, RangeError, TruncationMarginError, WindowError,
)


def test_hierarchy_roots_at_lab_error():
    for cls in (ArgumentError, DomainError, RangeError, NumericError, ContractError, ArchiveError):
        assert issubclass(cls, LabError)
    assert issubclass(ConditioningError, NumericError)
    assert issubclass(TruncationMarginError, NumericError)
    assert issubclass(AdmissibilityError, ContractError)
    assert issubclass(WindowError, ContractError)


def test_builtin_bases_are_kept():
    assert issubclass(DomainError, ValueError)
    assert issubclass(NumericError, ArithmeticError)
    assert issubclass(ArchiveError, OSError)


def test_detail_and_payloads():
    e = ConditioningError("ill-conditioned", 1e15)
    assert e.detail == "ill-conditioned"
    assert e.condition == 1e15
    assert e.diagnostics == {"condition": 1e15}
    a = ArchiveError("cannot read", path="/tmp/x.dpp")
    assert a.path == "/tmp/x.dpp"
    assert "/tmp/x.dpp" in str(a)
    with pytest.raises(LabError):
        raise RangeError("beyond rho_max")
