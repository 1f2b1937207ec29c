"""Unit tests for parameters, regime labels, and the model right-hand sides."""

import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from autotox_pulse import (
    ModelParams,
    StateTW,
    classify_regime,
    derive_tw_params,
    load_config,
    params_from_config,
    pde_rhs,
    tw_rhs_fast,
    tw_rhs_slow,
    uniform_steady_states,
)
from autotox_pulse.errors import ConfigError, DomainError, StructuralError


def _params(**overrides):
    base = dict(A=1.5, B=0.2, H=0.1, k=0.955, D=3160.0, eps=1e-3)
    base.update(overrides)
    return ModelParams(**base)


def _fields(U, V, S, dx):
    return SimpleNamespace(U=np.asarray(U, dtype=float),
                           V=np.asarray(V, dtype=float),
                           S=np.asarray(S, dtype=float), dx=float(dx))


class TestModelParams:
    def test_round_trip_through_dict(self):
        p = _params()
        assert ModelParams.from_dict(p.to_dict()) == p

    def test_rejects_nonpositive_values(self):
        for name in ("A", "B", "H", "k", "D", "eps"):
            with pytest.raises(DomainError):
                _params(**{name: 0.0})
            with pytest.raises(DomainError):
                _params(**{name: -1.0})

    def test_rejects_eps_at_or_above_one(self):
        with pytest.raises(DomainError):
            _params(eps=1.0)
        with pytest.raises(DomainError):
            _params(eps=1.5)

    def test_rejects_non_numbers(self):
        with pytest.raises(DomainError):
            _params(A=float("nan"))
        with pytest.raises(DomainError):
            _params(B=float("inf"))
        with pytest.raises(DomainError):
            _params(k=True)


class TestDeriveTWParams:
    def test_delta_is_inverse_of_c_times_D(self):
        p = _params(D=3160.0)
        tw = derive_tw_params(p, 0.0316493)
        assert abs(tw.delta - 1e-2) < 1e-3 * 1e-2
        assert abs(tw.delta * 0.0316493 * p.D - 1.0) < 1e-15
        assert tw.phys_speed == p.eps * 0.0316493

    def test_unit_case(self):
        tw = derive_tw_params(_params(D=1.0), 1.0)
        assert tw.delta == 1.0
        assert tw.phys_speed == _params().eps

    def test_large_D_case(self):
        tw = derive_tw_params(_params(D=37492.0, eps=1e-2), 0.0266721)
        assert abs(tw.delta - 1e-3) < 1e-4 * 1e-3

    def test_speed_recovers_exactly(self):
        p = _params()
        for c in (0.0316493, 0.5, 2.0):
            tw = derive_tw_params(p, c)
            back = 1.0 / (tw.delta * p.D)
            assert abs(back - c) < 1e-15 * c

    def test_rejects_nonpositive_speed(self):
        for bad in (0.0, -0.5, float("nan")):
            with pytest.raises(DomainError):
                derive_tw_params(_params(), bad)


class TestClassifyRegime:
    def test_reference_points(self):
        assert classify_regime(1e-3, 1e-2).tag == "i"
        assert classify_regime(1e-3, 1e-4).tag == "ii"
        assert classify_regime(1e-3, 1e-3).tag == "iv"
        assert classify_regime(1e-3, 0.5).tag == "v"
        assert classify_regime(1e-3, 20.0).tag == "iii"

    def test_ratio_is_recorded(self):
        lab = classify_regime(1e-3, 5e-3)
        assert lab.ratio == 5.0

    def test_decade_pad_absorbs_rounded_speeds(self):
        # delta computed from a speed quoted to six digits may land a
        # fraction of a percent inside the decade boundary
        assert classify_regime(1e-3, 9.9988e-3).tag == "i"
        assert classify_regime(1e-2, 1.00001e-3).tag == "ii"

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            classify_regime(0.0, 1e-2)
        with pytest.raises(DomainError):
            classify_regime(1.0, 1e-2)
        with pytest.raises(DomainError):
            classify_regime(1e-3, 0.0)


class TestPdeRhs:
    def test_bare_soil_is_an_equilibrium(self):
        f = _fields(np.ones(16), np.zeros(16), np.zeros(16), dx=0.5)
        for comp in pde_rhs(f, _params()):
            assert np.all(comp == 0.0)

    def test_uniform_plug_in_values(self):
        p = _params(k=1.0)
        f = _fields(np.ones(8), np.ones(8), np.zeros(8), dx=1.0)
        dU, dV, dS = pde_rhs(f, p)
        assert np.allclose(dU, -1.0, rtol=0, atol=1e-15)
        assert np.allclose(dV, -p.B, rtol=0, atol=1e-15)
        assert np.allclose(dS, p.B / p.D, rtol=0, atol=1e-18)

    def test_matches_pointwise_oracle(self):
        rng = np.random.default_rng(7)
        p = _params()
        n, dx = 32, 0.37
        U = rng.uniform(0.1, 1.2, n)
        V = rng.uniform(0.0, 0.8, n)
        S = rng.uniform(0.0, 0.4, n)
        dU, dV, dS = pde_rhs(_fields(U, V, S, dx), p)
        for i in range(n):
            im, ip = (i - 1) % n, (i + 1) % n
            lapU = (U[ip] - 2.0 * U[i] + U[im]) / dx ** 2
            lapV = (V[ip] - 2.0 * V[i] + V[im]) / dx ** 2
            eU = lapU + p.A * (1.0 - U[i]) - U[i] * V[i] ** 2
            eV = (p.eps ** 2 * lapV
                  + U[i] * V[i] ** 2 * (1.0 - p.k * V[i])
                  - p.B * V[i] - p.H * V[i] * S[i])
            eS = (-S[i] + p.B * V[i] + p.H * V[i] * S[i]) / p.D
            assert abs(dU[i] - eU) < 1e-14
            assert abs(dV[i] - eV) < 1e-14
            assert abs(dS[i] - eS) < 1e-14

    def test_translation_equivariance(self):
        rng = np.random.default_rng(11)
        p = _params()
        U, V, S = (rng.uniform(0.0, 1.0, 24) for _ in range(3))
        base = pde_rhs(_fields(U, V, S, 0.25), p)
        shifted = pde_rhs(_fields(np.roll(U, 5), np.roll(V, 5),
                                  np.roll(S, 5), 0.25), p)
        for a, b in zip(base, shifted):
            assert np.array_equal(np.roll(a, 5), b)

    def test_structural_errors(self):
        p = _params()
        with pytest.raises(StructuralError):
            pde_rhs(_fields(np.ones(8), np.ones(7), np.ones(8), 1.0), p)
        with pytest.raises(StructuralError):
            pde_rhs(_fields(np.ones(3), np.ones(3), np.ones(3), 1.0), p)
        with pytest.raises(StructuralError):
            pde_rhs(_fields(np.ones((4, 4)), np.ones((4, 4)),
                            np.ones((4, 4)), 1.0), p)
        with pytest.raises(DomainError):
            pde_rhs(_fields(np.ones(8), np.ones(8), np.ones(8), 0.0), p)


class TestTravellingWaveRhs:
    def test_origin_is_a_fixed_point(self):
        p = _params()
        tw = derive_tw_params(p, 0.05)
        origin = StateTW(1.0, 0.0, 0.0, 0.0, 0.0)
        assert np.all(tw_rhs_fast(origin, p, tw).as_array() == 0.0)
        assert np.all(tw_rhs_slow(origin, p, tw).as_array() == 0.0)

    def test_bare_plane_is_invariant(self):
        # with v = q = s = 0 the biomass and toxicity equations stay zero
        p = _params()
        tw = derive_tw_params(p, 0.04)
        rng = np.random.default_rng(3)
        for _ in range(20):
            st = StateTW(float(rng.uniform(0.2, 1.5)),
                         float(rng.uniform(-1.0, 1.0)), 0.0, 0.0, 0.0)
            d = tw_rhs_fast(st, p, tw)
            assert d.v == 0.0 and d.q == 0.0 and d.s == 0.0

    def test_fast_equals_eps_times_slow(self):
        p = _params()
        tw = derive_tw_params(p, 0.0316493)
        rng = np.random.default_rng(21)
        for _ in range(200):
            st = StateTW(*(float(x) for x in rng.uniform(-1.0, 1.5, 5)))
            fast = tw_rhs_fast(st, p, tw).as_array()
            slow = tw_rhs_slow(st, p, tw).as_array()
            scale = np.maximum(1.0, np.abs(fast))
            assert np.all(np.abs(fast - p.eps * slow) <= 1e-14 * scale)

    def test_state_round_trip_and_validation(self):
        st = StateTW(0.9, -0.1, 0.4, 0.0, 0.2)
        assert StateTW.from_array(st.as_array()) == st
        with pytest.raises(DomainError):
            StateTW(float("nan"), 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(StructuralError):
            StateTW.from_array(np.zeros(4))


class TestUniformSteadyStates:
    def test_bare_soil_always_first(self):
        states = uniform_steady_states(_params())
        assert states[0] == (1.0, 0.0, 0.0)

    def test_vegetated_states_have_small_residuals(self):
        p = _params()
        states = uniform_steady_states(p)
        assert len(states) == 3
        for U, V, S in states:
            f = _fields(np.full(8, U), np.full(8, V), np.full(8, S), 1.0)
            resid = max(np.abs(np.concatenate(pde_rhs(f, p))))
            assert resid < 1e-10
            assert 0.0 < U <= 1.0 and V >= 0.0 and S >= 0.0

    def test_heavy_mortality_leaves_only_bare_soil(self):
        states = uniform_steady_states(_params(B=1000.0))
        assert states == [(1.0, 0.0, 0.0)]


class TestConfig:
    def test_json_round_trip(self, tmp_path):
        cfg = {"A": 1.5, "B": 0.2, "H": 0.1, "k": 0.955,
               "D": 3160.0, "eps": 1e-3, "c": 0.0316493}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        loaded = load_config(path)
        assert loaded == cfg
        assert params_from_config(loaded) == _params()

    def test_toml_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            "A = 1.5\nB = 0.2\nH = 0.1\nk = 0.955\nD = 3160.0\neps = 1e-3\n")
        loaded = load_config(path)
        assert params_from_config(loaded) == _params()

    def test_speed_key_is_optional(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"A": 1.0, "B": 0.2, "H": 0.1,
                                    "k": 1.0, "D": 100.0, "eps": 0.01}))
        assert "c" not in load_config(path)

    def test_unknown_key_is_named(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"A": 1.0, "gamma": 2.0}))
        with pytest.raises(ConfigError, match="gamma"):
            load_config(path)

    def test_non_numeric_values_rejected(self, tmp_path):
        for bad in ('{"A": true}', '{"A": "1.5"}'):
            path = tmp_path / "run.json"
            path.write_text(bad)
            with pytest.raises(ConfigError):
                load_config(path)

    def test_json_syntax_error_carries_line(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{\n  "A": 1.5,\n}')
        with pytest.raises(ConfigError, match="line"):
            load_config(path)

    def test_extension_sniffing(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text('{"A": 2.0, "B": 0.1, "H": 0.2, "k": 1.0, '
                        '"D": 10.0, "eps": 0.1}')
        assert load_config(path)["A"] == 2.0

    def test_missing_keys_are_named(self):
        with pytest.raises(ConfigError, match="eps"):
            params_from_config({"A": 1.0, "B": 0.2, "H": 0.1,
                                "k": 1.0, "D": 10.0})
