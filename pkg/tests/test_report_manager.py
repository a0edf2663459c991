import pytest

from report_manager import DIVISOR_CACHE_SIZE, ParseError, ReportManager, cached_divisor


@pytest.fixture
def manager():
    cached_divisor.cache_clear()
    return ReportManager()


def test_divisor_cache_is_bounded(manager):
    assert cached_divisor.cache_info().maxsize == DIVISOR_CACHE_SIZE
    first = manager.parse_divisor(5, "psi:1 + psi:2")
    again = ReportManager().parse_divisor(5, "psi:1+psi:2")
    assert first is again
    assert cached_divisor.cache_info().hits == 1


def test_divisor_cache_evicts_old_entries(manager):
    for k in range(1, DIVISOR_CACHE_SIZE + 2):
        manager.parse_divisor(5, f"{k}*psi:1")
    assert cached_divisor.cache_info().currsize == DIVISOR_CACHE_SIZE


def test_empty_divisor_is_rejected(manager):
    with pytest.raises(ParseError):
        manager.parse_divisor(5, " + ")


def test_mult_report_closed_formula(manager):
    report = manager.mult("1,0;0,1;-1,0;0,-1", "1,4;2,3,5;3,5")
    assert report.result["classification"] == "C"
    assert report.result["direct"] == report.result["closed"] == 1
    assert report.status == "true"
