"""Closed-form real-root solvers for the model's three recurring cubics.

All three algebraic balances below reduce to cubics with real coefficients:

* ``case_i``: equilibria of the toxicity flow on the vegetated slow branches,
  H*k*u * v^3 - (k+H)*u * v^2 + u * v - B = 0, solved for v at fixed u.
* ``case_ii_s``: the same equilibrium set with v eliminated, solved for s,
  H*(1+A*H^2) * s^3 + (B + 3*A*B*H^2 + A*(k-H)) * s^2
  + A*B*(3*B*H - 1) * s + A*B^3 = 0.
* ``case_ii_v``: the companion form with s eliminated, solved for v,
  A*H*k * v^3 - (B + A*(H+k)) * v^2 + A * v - A*B = 0.

Roots come from the trigonometric/Cardano closed form, are polished with two
Newton steps, and pass a relative-residual gate before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .model import ModelParams

from .errors import ConvergenceError, DomainError

_RESIDUAL_GATE = 1e-10

WHICH_CUBICS = ("case_i", "case_ii_s", "case_ii_v")


@dataclass(frozen=True)
class CubicRootSet:
    """Real roots of one named cubic, sorted ascending.

    ``residuals`` holds the relative backward error of each root,
    |p(root)| / sum_j |c_j root^j|; construction fails if any exceeds
    the 1e-10 gate.
    """

    which_cubic: str
    coeffs: tuple
    roots: tuple
    residuals: tuple


def _eval_poly(coeffs, x):
    c3, c2, c1, c0 = coeffs
    return ((c3 * x + c2) * x + c1) * x + c0


def _eval_dpoly(coeffs, x):
    c3, c2, c1, _ = coeffs
    return (3.0 * c3 * x + 2.0 * c2) * x + c1


def _polish(coeffs, x):
    # two plain Newton steps; closed forms below are accurate enough that
    # this only shaves the last few ulps
    for _ in range(2):
        d = _eval_dpoly(coeffs, x)
        if d == 0.0:
            break
        x -= _eval_poly(coeffs, x) / d
    return x


def real_cubic_roots(c3, c2, c1, c0):
    """All real roots of c3*x^3 + c2*x^2 + c1*x + c0, sorted ascending.

    Degenerate leading coefficients fall back to the quadratic and linear
    cases. Repeated roots are returned with multiplicity.
    """
    c3, c2, c1, c0 = float(c3), float(c2), float(c1), float(c0)
    scale = max(abs(c3), abs(c2), abs(c1), abs(c0))
    if scale == 0.0:
        raise DomainError("all cubic coefficients are zero")
    if abs(c3) <= 1e-300 * scale:
        if abs(c2) <= 1e-300 * scale:
            if c1 == 0.0:
                return []
            return [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        r = math.sqrt(disc)
        return sorted([(-c1 - r) / (2.0 * c2), (-c1 + r) / (2.0 * c2)])

    b = c2 / c3
    c = c1 / c3
    d = c0 / c3
    # depressed form t^3 + p t + q with x = t - b/3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0

    if p == 0.0 and q == 0.0:
        roots = [shift, shift, shift]
    else:
        disc = -4.0 * p ** 3 - 27.0 * q * q
        if disc >= 0.0 and p < 0.0:
            # three real roots, trigonometric form
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * m)
            arg = min(1.0, max(-1.0, arg))
            theta = math.acos(arg)
            roots = [shift + m * math.cos((theta - 2.0 * math.pi * kk) / 3.0)
                     for kk in range(3)]
        else:
            # single real root, Cardano with cancellation-safe branch
            h = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
            if q >= 0.0:
                u3 = -q / 2.0 - h
            else:
                u3 = -q / 2.0 + h
            u = math.copysign(abs(u3) ** (1.0 / 3.0), u3)
            v = -p / (3.0 * u) if u != 0.0 else 0.0
            roots = [shift + u + v]

    coeffs = (c3, c2, c1, c0)
    return sorted(_polish(coeffs, r) for r in roots)


def _root_set(which, coeffs):
    roots = real_cubic_roots(*coeffs)

    def backward(r):
        # relative backward error |p(r)| / sum_j |c_j r^j|; scale-free,
        # a few ulps for a correctly rounded root of any magnitude
        num = abs(_eval_poly(coeffs, r))
        den = sum(abs(co) * abs(r) ** j
                  for j, co in enumerate(reversed(coeffs)))
        return num / den if den > 0.0 else num

    residuals = tuple(backward(r) for r in roots)
    for r, res in zip(roots, residuals):
        if res > _RESIDUAL_GATE:
            raise ConvergenceError(
                "cubic %s root %.17g has residual %.3g above the %.0e gate"
                % (which, r, res, _RESIDUAL_GATE))
    return CubicRootSet(which_cubic=which, coeffs=coeffs,
                        roots=tuple(roots), residuals=residuals)


def cubic_v_roots(u, params: "ModelParams"):
    """Roots v of H*k*u v^3 - (k+H)*u v^2 + u v - B = 0 at fixed u > 0."""
    u = float(u)
    if u <= 0.0:
        raise DomainError("u must be positive, got %g" % u)
    coeffs = (params.H * params.k * u, -(params.k + params.H) * u, u,
              -params.B)
    return _root_set("case_i", coeffs)


def cubic_s_case_ii(params: "ModelParams"):
    """Roots s of the toxicity-eliminated equilibrium cubic."""
    A, B, H, k = params.A, params.B, params.H, params.k
    coeffs = (H * (1.0 + A * H * H),
              B + 3.0 * A * B * H * H + A * (k - H),
              A * B * (3.0 * B * H - 1.0),
              A * B ** 3)
    return _root_set("case_ii_s", coeffs)


def cubic_v_case_ii(params: "ModelParams"):
    """Roots v of A*H*k v^3 - (B + A*(H+k)) v^2 + A v - A*B = 0."""
    A, B, H, k = params.A, params.B, params.H, params.k
    coeffs = (A * H * k, -(B + A * (H + k)), A, -A * B)
    return _root_set("case_ii_v", coeffs)
