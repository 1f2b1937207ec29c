"""Unit tests for the existence report and its verdict structures."""

import json

import numpy as np
import pytest

from autotox_pulse import ModelParams, existence_report
from autotox_pulse.errors import DomainError


def _params(**overrides):
    base = dict(A=1.5, B=0.2, H=0.1, k=0.955, D=3160.0, eps=1e-3)
    base.update(overrides)
    return ModelParams(**base)


class TestVerdicts:
    def test_reference_set_low_k(self):
        r = existence_report(_params(k=0.955))
        assert not r.thm1.holds
        assert r.thm1.violated == ("H >= 2k", "(1-4kB)/(4kB) < H/(2k-H)",
                                   "s2(1) > s_star")
        assert r.thm2.holds and r.thm2.violated == ()
        assert abs(r.thm2.U_star - 0.37970704552459367) < 1e-12
        assert abs(r.thm2.u_star - 0.89270841420193969) < 1e-12
        assert abs(r.thm2.s_star - 0.14449634579726764) < 1e-12
        assert r.thm3.holds
        assert abs(r.thm3.s0 - 0.10413673175466164) < 1e-10
        assert abs(r.thm3.c - 0.026714565321420827) < 1e-10
        assert abs(r.thm3.u1_plus - 0.81468329214581636) < 1e-10

    def test_reference_set_high_k(self):
        # the plateau still exists here, though it has become so narrow
        # that only the scalars betray it; the descent at u = 1 is blocked
        # by the branch equilibrium, so the plateau-free orbit fails
        r = existence_report(_params(k=1.059))
        assert not r.thm1.holds
        assert "s2(1) > s_star" in r.thm1.violated
        assert r.thm2.holds
        assert abs(r.thm2.u_star - 0.98598784546970486) < 1e-12
        assert not r.thm3.holds
        assert r.thm3.violated != ()

    def test_plateau_free_set(self):
        # slightly stronger autotoxicity clears the blocking equilibrium
        # and simultaneously pushes the plateau root out of its interval
        r = existence_report(_params(k=1.08))
        assert r.thm1.holds and r.thm1.violated == ()
        assert not r.thm2.holds
        assert r.thm2.violated == ("U_star < sqrt(1-4kB)",)
        assert not r.thm3.holds

    def test_noplateau_window_failures_are_reported(self):
        r = existence_report(_params(B=0.1), include=("thm1",))
        assert not r.thm1.holds
        assert r.thm1.violated == ("4kB > 5/9",)


class TestExclusivity:
    def test_plateau_and_no_plateau_never_coexist(self):
        rng = np.random.default_rng(61)
        for _ in range(300):
            p = _params(k=float(rng.uniform(0.4, 1.4)),
                        B=float(rng.uniform(0.05, 0.45)),
                        H=float(rng.uniform(0.02, 0.6)))
            r = existence_report(p, include=("thm1", "thm2"))
            assert not (r.thm1.holds and r.thm2.holds), (
                "both pulse types reported at %r" % (p,))


class TestReportOptions:
    def test_partial_include(self):
        r = existence_report(_params(), include=("thm2",))
        assert r.thm1 is None and r.thm3 is None
        assert r.thm2.holds

    def test_unknown_include_rejected(self):
        with pytest.raises(DomainError):
            existence_report(_params(), include=("thm4",))

    def test_regime_from_reported_speed(self):
        # without an explicit speed the label uses the singular-limit
        # prediction, which sits a stretched decade below eps here
        r = existence_report(_params())
        assert r.regime.tag == "iv"
        assert abs(r.regime.ratio - 6.654442327805917) < 1e-9

    def test_regime_with_explicit_speed(self):
        r = existence_report(_params(D=2277.05), c=0.0439164)
        assert r.regime.tag == "i"

    def test_no_speed_no_regime(self):
        # with every construction failing there is no speed to classify
        r = existence_report(_params(B=0.1, k=1.2, H=0.5),
                             include=("thm1",))
        assert r.regime is None


class TestSerialization:
    def test_json_round_trip(self):
        r = existence_report(_params())
        d = json.loads(r.to_json())
        assert sorted(d.keys()) == ["regime", "thm1", "thm2", "thm3"]
        assert d["thm1"]["holds"] is False
        assert d["thm2"]["holds"] is True
        assert d["thm2"]["violated"] == []
        assert abs(d["thm3"]["c"] - 0.026714565321420827) < 1e-10
        assert d["regime"]["tag"] == "iv"

    def test_partial_report_serializes_nulls(self):
        d = json.loads(existence_report(_params(),
                                        include=("thm2",)).to_json())
        assert d["thm1"] is None and d["thm3"] is None
