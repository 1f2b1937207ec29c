"""Unit tests for the fast-toxicity pulse constructions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from autotox_pulse import (
    ModelParams,
    jump_speed,
    noplateau_flow_blocked,
    plateau_arc,
    s2_of_u,
    solve_plateau_case_i,
    solve_sstar_noplateau,
    upper_branch_s_flow,
    v2_of_u,
    v_pm,
)
from autotox_pulse.errors import (
    ConditionViolated,
    NoConnectionError,
)


def _params(**overrides):
    base = dict(A=1.5, B=0.2, H=0.1, k=0.955, D=3160.0, eps=1e-3)
    base.update(overrides)
    return ModelParams(**base)


def _sstar_bisection(params):
    # speed matching solved directly on the front speeds, without the
    # closed form: the up-front at (1, s) must run as fast as the
    # down-front at (1, 0)
    s_fold = (1.0 - 4.0 * params.k * params.B) / (4.0 * params.k * params.H)

    def f(s):
        return (jump_speed(1.0, s, "dagger", params)
                - jump_speed(1.0, 0.0, "diamond", params))

    return brentq(f, 0.0, s_fold * (1.0 - 1e-12), xtol=1e-15)


def _ustar_poly_roots(params):
    # expanded coefficients of the plateau matching equation in x = 3 U_star
    k, H = params.k, params.H
    roots = np.roots([H, -9.0 * H, 15.0 * H - 24.0 * k, 24.0 * k + 25.0 * H])
    real = [float(r.real) for r in roots
            if abs(r.imag) < 1e-10 and 1.0 < r.real < 3.0]
    assert len(real) == 1
    return real[0] / 3.0


class TestSstarNoPlateau:
    def test_frozen_reference_values(self):
        assert abs(solve_sstar_noplateau(_params(k=1.059))
                   - 0.18118688190276358) < 1e-13
        assert abs(solve_sstar_noplateau(_params(k=0.955))
                   - 0.53216397461190723) < 1e-13

    def test_matches_bisection_on_front_speeds(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            w = float(rng.uniform(5.0 / 9.0 + 0.01, 8.0 / 9.0 - 0.01))
            k = float(rng.uniform(0.5, 1.3))
            p = _params(k=k, B=w / (4.0 * k),
                        H=float(rng.uniform(0.05, 0.4)))
            got = solve_sstar_noplateau(p)
            assert abs(got - _sstar_bisection(p)) < 1e-10

    def test_window_boundary_limits(self):
        # at the upper edge the jump height collapses; near the lower edge
        # it approaches 1/(9Hk), the value at which the up-front base
        # point returns to the fold (so the edge itself is untouchable)
        k, H = 0.955, 0.1
        hi = _params(k=k, H=H, B=(8.0 / 9.0 - 1e-9) / (4.0 * k))
        assert 0.0 < solve_sstar_noplateau(hi) < 1e-7
        lo = _params(k=k, H=H, B=(5.0 / 9.0 + 1e-4) / (4.0 * k))
        limit = 1.0 / (9.0 * H * k)
        got = solve_sstar_noplateau(lo)
        assert got < limit
        assert abs(got - limit) < 1e-3 * limit

    def test_window_violations_are_named(self):
        with pytest.raises(ConditionViolated) as info:
            solve_sstar_noplateau(_params(B=0.1))
        assert info.value.failed == ["4kB > 5/9"]
        with pytest.raises(ConditionViolated) as info:
            solve_sstar_noplateau(_params(B=0.3))
        assert info.value.failed == ["4kB < 8/9"]


class TestBranchEquilibrium:
    def test_frozen_reference_values(self):
        assert abs(v2_of_u(1.0, _params())
                   - 0.74241274563185344) < 1e-13
        assert abs(v2_of_u(1.0, _params(k=1.059))
                   - 0.61910666555659966) < 1e-13
        assert abs(s2_of_u(1.0, _params())
                   - 0.16039011574674591) < 1e-13
        assert abs(s2_of_u(1.0, _params(k=1.059))
                   - 0.13199311483128237) < 1e-13

    def test_equilibrium_consistency(self):
        # v2 must sit on the upper slow branch at its own toxicity level,
        # and s2 must null the toxicity balance there
        rng = np.random.default_rng(19)
        count = 0
        while count < 40:
            k = float(rng.uniform(0.8, 1.2))
            p = _params(k=k,
                        B=float(rng.uniform(0.6, 0.82)) / (4.0 * k))
            u = float(rng.uniform(0.9, 1.1))
            try:
                v2 = v2_of_u(u, p)
            except ConditionViolated:
                continue
            count += 1
            s2 = s2_of_u(u, p)
            assert abs(s2 * (1.0 - p.H * v2) - p.B * v2) < 1e-13
            assert abs(v_pm(u, s2, p)[1] - v2) < 1e-10
            resid = p.H * p.k * u * v2 ** 3 - (p.k + p.H) * u * v2 ** 2 \
                + u * v2 - p.B
            assert abs(resid) < 1e-12

    def test_missing_equilibrium_is_reported(self):
        with pytest.raises(ConditionViolated) as info:
            v2_of_u(0.2, _params())
        assert info.value.failed == ["upper-branch equilibrium exists"]


class TestUpperBranchFlow:
    def test_zero_exactly_at_equilibrium(self):
        p = _params()
        s2 = s2_of_u(1.0, p)
        assert abs(upper_branch_s_flow(s2, 1.0, p)) < 1e-13

    def test_drift_is_negative_below_and_positive_above(self):
        p = _params()
        s2 = s2_of_u(1.0, p)
        assert upper_branch_s_flow(0.0, 1.0, p) < 0.0
        assert upper_branch_s_flow(0.5 * s2, 1.0, p) < 0.0
        assert upper_branch_s_flow(1.5 * s2, 1.0, p) > 0.0

    def test_blocking_flags(self):
        # at both example values the descent hits the equilibrium first;
        # raising the autotoxicity strength a little frees the passage
        assert noplateau_flow_blocked(_params(k=0.955))
        assert noplateau_flow_blocked(_params(k=1.059))
        assert not noplateau_flow_blocked(_params(k=1.08))

    def test_blocking_matches_equilibrium_ordering(self):
        for k in (0.955, 1.059, 1.08):
            p = _params(k=k)
            blocked = noplateau_flow_blocked(p)
            assert blocked == (s2_of_u(1.0, p)
                               <= solve_sstar_noplateau(p))


class TestPlateauScalars:
    def test_frozen_reference_values(self):
        U, u, s, c = solve_plateau_case_i(_params())
        assert abs(U - 0.37970704552459367) < 1e-13
        assert abs(u - 0.89270841420193969) < 1e-13
        assert abs(s - 0.14449634579726764) < 1e-13
        assert abs(c - 0.047555554712707608) < 1e-13
        U, u, s, c = solve_plateau_case_i(_params(k=1.059))
        assert abs(U - 0.37518022220214747) < 1e-13
        assert abs(u - 0.98598784546970486) < 1e-13
        assert abs(s - 0.12987259614533292) < 1e-13
        assert abs(c - 0.04282794511851299) < 1e-13

    def test_matches_polynomial_roots(self):
        rng = np.random.default_rng(29)
        count = 0
        while count < 40:
            k = float(rng.uniform(0.4, 1.2))
            p = _params(k=k, H=float(rng.uniform(0.05, 0.85)) * k,
                        B=float(rng.uniform(0.05, 0.9)) / (4.0 * k))
            try:
                U = solve_plateau_case_i(p)[0]
            except ConditionViolated:
                continue
            assert abs(U - _ustar_poly_roots(p)) < 1e-12
            count += 1

    def test_derived_scalars_are_consistent(self):
        p = _params()
        U, u, s, c = solve_plateau_case_i(p)
        assert abs(u - 4.0 * p.k * p.B / (1.0 - U * U)) < 1e-14
        assert abs(s - s2_of_u(u, p)) < 1e-12
        assert c == jump_speed(u, 0.0, "diamond", p)

    def test_boundary_ratio_gives_exact_two_thirds(self):
        # H/k = 8/9 collapses the admissible interval to its left edge
        p = _params(k=0.45, H=0.4, B=0.2)
        U, u, s, c = solve_plateau_case_i(p)
        assert abs(U - 2.0 / 3.0) < 1e-12
        assert abs(u - 0.648) < 1e-12
        assert abs(s - 0.4) < 1e-12
        assert abs(c - math.sqrt(0.18)) < 1e-12

    def test_lower_bound_violation_named(self):
        with pytest.raises(ConditionViolated) as info:
            solve_plateau_case_i(_params(k=0.45, H=0.45, B=0.2))
        assert info.value.failed == ["sqrt(H/(2k)) < U_star"]
        # far past the ratio bound the matching equation loses its root
        with pytest.raises(ConditionViolated) as info:
            solve_plateau_case_i(_params(k=0.45, H=1.5, B=0.2))
        assert info.value.failed == ["sqrt(H/(2k)) < U_star"]

    def test_upper_bound_violation_named(self):
        with pytest.raises(ConditionViolated) as info:
            solve_plateau_case_i(_params(B=0.98 / (4.0 * 0.955)))
        assert "U_star < sqrt(1-4kB)" in info.value.failed

    def test_water_uptake_bound_named(self):
        with pytest.raises(ConditionViolated) as info:
            solve_plateau_case_i(_params(B=0.3))
        assert info.value.failed == ["4kB < 1"]


class TestPlateauArc:
    def test_shape_and_endpoints(self):
        p = _params()
        u_star = solve_plateau_case_i(p)[1]
        rows, u_turn = plateau_arc(u_star, p)
        assert rows.shape == (161, 5)
        p_star = math.sqrt(p.A) * (u_star - 1.0)
        assert rows[0][0] == u_star and rows[-1][0] == u_star
        assert abs(rows[0][1] - p_star) < 1e-15
        assert abs(rows[-1][1] + p_star) < 1e-15
        assert abs(u_turn - 0.83950271435705004) < 1e-12
        assert u_turn < u_star

    def test_rows_stay_on_branch_equilibrium(self):
        p = _params()
        rows, _ = plateau_arc(solve_plateau_case_i(p)[1], p)
        for u, _, v, q, s in rows:
            assert q == 0.0
            assert abs(v - v2_of_u(u, p)) < 1e-10
            assert abs(s * (1.0 - p.H * v) - p.B * v) < 1e-12

    def test_mirror_symmetry(self):
        p = _params()
        rows, _ = plateau_arc(solve_plateau_case_i(p)[1], p, n_half=40)
        n = len(rows)
        assert n == 81
        # the middle row sits at the turning point, where p is the square
        # root of a near-zero energy and carries its quadrature noise
        for i in range(n):
            assert abs(rows[i][0] - rows[n - 1 - i][0]) < 1e-12
            assert abs(rows[i][1] + rows[n - 1 - i][1]) < 1e-8

    def test_energy_is_conserved_along_arc(self):
        # independent quadrature of the Newtonian energy at sampled rows
        p = _params()
        u_star = solve_plateau_case_i(p)[1]
        rows, _ = plateau_arc(u_star, p)

        def accel(u):
            v2 = v2_of_u(u, p)
            return u * v2 * v2 - p.A * (1.0 - u)

        h0 = 0.5 * rows[0][1] ** 2
        for u, pw, _, _, _ in rows[::16]:
            shift = quad(accel, u_star, u, epsabs=1e-13, epsrel=1e-12,
                         limit=200)[0]
            assert abs(0.5 * pw * pw - shift - h0) < 1e-8

    def test_degenerate_start_raises(self):
        with pytest.raises(NoConnectionError):
            plateau_arc(1.0, _params())

    def test_saddle_interception_raises(self):
        # starting below the true arc's turning point, the march down hits
        # the superslow saddle before the energy runs out
        with pytest.raises(NoConnectionError):
            plateau_arc(0.83, _params())
