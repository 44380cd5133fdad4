import warnings
from fractions import Fraction

import pytest

from rirsim.metrics import (
    DivisibilityWarning,
    DsfTable,
    EmptyEventList,
    closed_form_dod,
    closed_form_dod_exact,
    closed_form_dof,
    closed_form_dof_exact,
    complexity,
    dof_gain,
    event_dod,
)
from rirsim.model import DataSetSpec, NetworkConfig
from rirsim.numerics import rng_stream
from rirsim.schemes import DecodeEvent, Scheme, simulate

C243 = NetworkConfig(2, 4, 3)


# -- DSF and event DoD -------------------------------------------------------

def test_dsf_table():
    t = DsfTable()
    assert t.dsf(1) == 1 and t.dsf(5) == Fraction(1, 5)
    assert [t.dsf(p) for p in range(1, 6)] == sorted((t.dsf(p) for p in range(1, 6)), reverse=True)
    assert t.dsf(1) / t.dsf(5) == 5
    with pytest.raises(ValueError):
        t.dsf(6)


def test_event_dod_examples():
    assert event_dod([DecodeEvent(0, 1, 1, 1)]).dod == 0
    r = event_dod([DecodeEvent(0, 5, 6, 6)])
    assert r.dod == 1.0 and r.d_sum == 1.0 and r.num == 1


def test_event_dod_report_consistency():
    events = [DecodeEvent(i, 1 if i < 3 else 5, 1 + i // 2, 1) for i in range(8)]
    r = event_dod(events)
    assert r.dod == pytest.approx(r.d_sum / r.num)
    assert sum(r.per_priority_breakdown.values()) == pytest.approx(r.d_sum)
    assert set(r.per_priority_breakdown) == {1, 5}


def test_event_dod_empty():
    with pytest.raises(EmptyEventList):
        event_dod([])


def test_tdma_event_dod_matches_known_value():
    tr = simulate(Scheme.TDMA, C243, DataSetSpec(2400, 0), rng_stream(0), signal=False)
    assert event_dod(tr.events).dod == 399.5


# -- closed forms ------------------------------------------------------------

@pytest.mark.parametrize("scheme,A,B,expected", [
    (Scheme.RIA, 0, 2400, Fraction(141, 2)),
    (Scheme.RIA, 2400, 0, Fraction(705, 2)),
    (Scheme.PIE, 0, 2400, Fraction(599, 10)),
    (Scheme.TDMA, 0, 2400, Fraction(799, 10)),
    (Scheme.TDMA, 2400, 0, Fraction(799, 2)),
    (Scheme.BD_TDMA, 0, 2400, Fraction(599, 10)),
    (Scheme.BD_TDMA, 2400, 0, Fraction(599, 2)),
])
def test_closed_form_dod_values(scheme, A, B, expected):
    assert closed_form_dod_exact(scheme, C243, A, B) == expected
    assert closed_form_dod(scheme, C243, A, B) == float(expected)


def test_closed_form_dod_warns_when_not_divisible():
    with pytest.warns(DivisibilityWarning):
        closed_form_dod(Scheme.TDMA, C243, 1, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        closed_form_dod(Scheme.TDMA, C243, 3, 6)


def test_closed_form_dod_rejects_empty_dataset():
    with pytest.raises(ValueError):
        closed_form_dod(Scheme.TDMA, C243, 0, 0)


@pytest.mark.parametrize("scheme,cfg,expected", [
    (Scheme.CIE, NetworkConfig(3, 60, 20), Fraction(45)),
    (Scheme.IPIE, NetworkConfig(3, 60, 25), Fraction(60)),
    (Scheme.IPIE, NetworkConfig(3, 60, 20), Fraction(60)),
    (Scheme.PIE, NetworkConfig(2, 6, 2), Fraction(4)),
    (Scheme.CIE, NetworkConfig(3, 60, 25), Fraction(375, 7)),
    (Scheme.PIE, NetworkConfig(3, 60, 25), Fraction(50)),
    (Scheme.RIA, C243, Fraction(24, 7)),
    (Scheme.TDMA, C243, Fraction(3)),
    (Scheme.BD_TDMA, C243, Fraction(4)),
])
def test_closed_form_dof_values(scheme, cfg, expected):
    assert closed_form_dof_exact(scheme, cfg) == expected
    assert closed_form_dof(scheme, cfg) == float(expected)


def test_dof_ordering_across_n():
    for N in range(10, 26):
        cfg = NetworkConfig(3, 60, N)
        ipie, cie, pie = (closed_form_dof_exact(s, cfg) for s in (Scheme.IPIE, Scheme.CIE, Scheme.PIE))
        assert ipie >= cie >= pie


def test_dof_gain_values():
    cfg = NetworkConfig(3, 60, 25)
    assert dof_gain(Scheme.PIE, cfg) == pytest.approx(0.5)
    assert dof_gain(Scheme.CIE, cfg) == pytest.approx(9 / 14)
    assert dof_gain(Scheme.IPIE, cfg) == pytest.approx(0.9)
    cfg = NetworkConfig(3, 60, 10)
    assert [dof_gain(s, cfg) for s in (Scheme.PIE, Scheme.CIE, Scheme.IPIE)] == \
        pytest.approx([0.5, 1.5, 1.5])


def test_closed_form_dod_monotone_in_priority_fraction():
    for scheme in (Scheme.TDMA, Scheme.BD_TDMA, Scheme.RIA, Scheme.PIE):
        vals = [closed_form_dod_exact(scheme, C243, a, 2400 - a) for a in range(0, 2401, 24)]
        assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_event_dod_monotone_in_priority_fraction():
    for scheme in (Scheme.TDMA, Scheme.RIA, Scheme.PIE, Scheme.CIE):
        cfg = NetworkConfig(2, 6, 2)
        vals = [event_dod(simulate(scheme, cfg, DataSetSpec(a, 48 - a), rng_stream(0),
                                   signal=False, strict=False).events).exact
                for a in range(0, 49, 4)]
        assert all(x <= y for x, y in zip(vals, vals[1:]))


# -- complexity --------------------------------------------------------------

def test_complexity_examples():
    cfg = NetworkConfig(3, 60, 10)
    ria = complexity(Scheme.RIA, cfg)
    assert ria.user_cost == 216_000 and not ria.relay_applicable and ria.relay_cost == 0
    pie = complexity(Scheme.PIE, cfg)
    assert pie.user_cost == 1000 and pie.condition_branch == "ceil(M/2) > N"
    assert pie.relay_cost == (2 * 30 + 2) * 10 ** 5
    assert complexity(Scheme.CIE, cfg).relay_cost == (2 * 30 + 3) * 10 ** 5
    assert complexity(Scheme.IPIE, cfg).relay_cost == 30 ** 6 * 60 ** 2 + 3 * 10 ** 5


def test_complexity_branches():
    small = NetworkConfig(2, 4, 3)
    assert complexity(Scheme.RIA, small).user_cost == (3 // 1) ** 3 * 4 ** 3
    assert complexity(Scheme.RIA, small).condition_branch == "M <= 2N"
    assert complexity(Scheme.PIE, small).user_cost == 2 ** 3
    assert complexity(Scheme.PIE, small).relay_cost == 2 * 2 * 3 ** 5
    ipie = complexity(Scheme.IPIE, NetworkConfig(3, 60, 20))
    assert ipie.user_cost == 20 ** 3 and ipie.condition_branch == "ceil(M/K) <= N"


def test_complexity_untabulated_schemes():
    for s in (Scheme.TDMA, Scheme.BD_TDMA):
        r = complexity(s, C243)
        assert not r.relay_applicable and not r.user_applicable


def test_costs_non_negative():
    for N in range(10, 26):
        for s in Scheme:
            r = complexity(s, NetworkConfig(3, 60, N))
            assert r.relay_cost >= 0 and r.user_cost >= 0
