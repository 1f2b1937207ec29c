"""Unit tests for the closed-form cubic solvers."""

import math

import numpy as np
import pytest

from autotox_pulse import ModelParams
from autotox_pulse.cubics import (
    cubic_s_case_ii,
    cubic_v_case_ii,
    cubic_v_roots,
    real_cubic_roots,
)
from autotox_pulse.errors import DomainError


def _params(**overrides):
    base = dict(A=1.5, B=0.2, H=0.1, k=0.955, D=3160.0, eps=1e-3)
    base.update(overrides)
    return ModelParams(**base)


def _oracle_real_roots(coeffs):
    roots = np.roots(coeffs)
    keep = [float(r.real) for r in roots
            if abs(r.imag) <= 1e-7 * max(1.0, abs(r))]
    return sorted(keep)


class TestRealCubicRoots:
    def test_known_factored_cubic(self):
        roots = real_cubic_roots(1.0, -6.0, 11.0, -6.0)
        assert np.allclose(roots, [1.0, 2.0, 3.0], rtol=0, atol=1e-12)

    def test_triple_root(self):
        roots = real_cubic_roots(1.0, -3.0, 3.0, -1.0)
        assert roots == [1.0, 1.0, 1.0]

    def test_single_real_root(self):
        # x^3 + x + 2 = (x + 1)(x^2 - x + 2); the complex pair is dropped
        roots = real_cubic_roots(1.0, 0.0, 1.0, 2.0)
        assert len(roots) == 1
        assert abs(roots[0] + 1.0) < 1e-13

    def test_quadratic_fallback(self):
        assert np.allclose(real_cubic_roots(0.0, 1.0, -3.0, 2.0),
                           [1.0, 2.0], rtol=0, atol=1e-13)
        assert real_cubic_roots(0.0, 1.0, 0.0, 1.0) == []

    def test_linear_fallback(self):
        assert real_cubic_roots(0.0, 0.0, 2.0, -4.0) == [2.0]
        assert real_cubic_roots(0.0, 0.0, 0.0, 1.0) == []

    def test_all_zero_rejected(self):
        with pytest.raises(DomainError):
            real_cubic_roots(0.0, 0.0, 0.0, 0.0)

    def test_matches_numpy_on_random_coefficients(self):
        rng = np.random.default_rng(1234)
        for _ in range(300):
            coeffs = rng.uniform(-2.0, 2.0, size=4)
            if abs(coeffs[0]) < 1e-3:
                coeffs[0] = math.copysign(1e-3, coeffs[0] or 1.0)
            mine = real_cubic_roots(*coeffs)
            theirs = _oracle_real_roots(coeffs)
            assert len(mine) == len(theirs), \
                "root count mismatch for coeffs %r" % (coeffs,)
            for a, b in zip(mine, theirs):
                assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


class TestNamedCubics:
    def test_case_i_root_set_structure(self):
        rs = cubic_v_roots(1.0, _params())
        assert rs.which_cubic == "case_i"
        assert list(rs.roots) == sorted(rs.roots)
        assert max(rs.residuals) < 1e-10
        c3, c2, _, _ = rs.coeffs
        # Vieta check: with all three roots real their sum is -c2/c3
        assert len(rs.roots) == 3
        assert abs(sum(rs.roots) + c2 / c3) < 1e-9 * abs(c2 / c3)

    def test_case_i_recovers_backsubstituted_root(self):
        # pick B so that v = 0.5 is an exact root at u = 1
        k, H, u, v = 0.955, 0.1, 1.0, 0.5
        B = u * (H * k * v ** 3 - (k + H) * v ** 2 + v)
        rs = cubic_v_roots(u, _params(B=B, k=k, H=H))
        assert min(abs(r - v) for r in rs.roots) < 1e-12

    def test_case_i_rejects_nonpositive_u(self):
        with pytest.raises(DomainError):
            cubic_v_roots(0.0, _params())
        with pytest.raises(DomainError):
            cubic_v_roots(-1.0, _params())

    def test_s_and_v_cubics_describe_the_same_equilibria(self):
        # s = B*v/(1 - H*v) must map every v-root onto an s-root
        for params in (_params(), _params(k=1.059)):
            v_roots = cubic_v_case_ii(params).roots
            s_roots = cubic_s_case_ii(params).roots
            assert len(v_roots) == len(s_roots)
            for v in v_roots:
                s = params.B * v / (1.0 - params.H * v)
                err = min(abs(s - r) for r in s_roots)
                assert err < 1e-10 * max(1.0, abs(s))

    def test_named_cubics_match_numpy_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            params = _params(
                A=float(rng.uniform(0.2, 3.0)),
                B=float(rng.uniform(0.05, 1.0)),
                H=float(rng.uniform(0.05, 1.0)),
                k=float(rng.uniform(0.3, 2.0)))
            u = float(rng.uniform(0.2, 1.5))
            for rs in (cubic_v_roots(u, params),
                       cubic_s_case_ii(params),
                       cubic_v_case_ii(params)):
                theirs = _oracle_real_roots(rs.coeffs)
                assert len(rs.roots) == len(theirs), \
                    "count mismatch in %s" % rs.which_cubic
                for a, b in zip(rs.roots, theirs):
                    assert abs(a - b) <= 1e-12 * max(1.0, abs(b))
                assert max(rs.residuals) < 1e-10
