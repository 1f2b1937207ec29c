"""Fast-layer analysis: slow-manifold branches, heteroclinic jumps, Melnikov.

At a frozen base point (u0, s0) the biomass layer equation reads

    v_zetazeta + c*v_zeta = k*u0 * v * (v - v_minus) * (v - v_plus),

a bistable cubic whose outer zeros v_pm collide on the fold where
4*k*(B + H*s0)/u0 reaches 1. The two explicit front solutions (up and
down) select unique speeds, and the Melnikov integrals quantify how each
front breaks when (u, s, c) are varied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DivergentIntegralError,
    DomainError,
    FoldCrossedError,
)
from .model import ModelParams

DIRECTIONS = ("dagger", "diamond")

# residual gate applied to every constructed front profile
_PROFILE_GATE = 1e-10
# quadrature is declared converged when panel doubling moves no integral
# by more than this relative amount
_QUAD_RTOL = 1e-9


@dataclass(frozen=True)
class HeteroclinicJump:
    """One fast front between the bare branch and a vegetated branch.

    dir is "dagger" for the upward front (bare to vegetated) and
    "diamond" for the downward one. speed carries the signed value of
    the selected wave speed; the two directions are exact negatives.
    """

    dir: str
    u0: float
    s0: float
    v_plus: float
    v_minus: float
    speed: float
    alpha: float


@dataclass(frozen=True)
class MelnikovTriple:
    """Break integrals of a front with respect to u, s, and c."""

    M_u: float
    M_s: float
    M_c: float
    quadrature_error: float


def v_pm(u, s, params: ModelParams):
    """Outer zeros (v_minus, v_plus) of the layer cubic at (u, s).

    Defined while u > 4k(B+Hs); on the fold (equality) both values
    degenerate to 1/(2k), and past it a FoldCrossedError is raised.
    """
    u = float(u)
    s = float(s)
    if u <= 0.0:
        raise DomainError("base point needs u > 0, got %g" % u)
    if s < 0.0:
        raise DomainError("base point needs s >= 0, got %g" % s)
    alpha = 4.0 * params.k * (params.B + params.H * s) / u
    if alpha > 1.0:
        raise FoldCrossedError(
            "slow-manifold fold crossed at (u=%g, s=%g): "
            "4k(B+Hs)/u = %.6g > 1" % (u, s, alpha),
            failed=["4k(B+Hs)/u <= 1"])
    r = math.sqrt(1.0 - alpha)
    return ((1.0 - r) / (2.0 * params.k), (1.0 + r) / (2.0 * params.k))


def _alpha(u0, s0, params):
    return 4.0 * params.k * (params.B + params.H * s0) / u0


def jump_speed(u0, s0, dir, params: ModelParams):
    """Signed front speed: positive-dagger form for dir="dagger",
    its negative for dir="diamond"."""
    if dir not in DIRECTIONS:
        raise DomainError("dir must be one of %r, got %r" % (DIRECTIONS, dir))
    alpha = _alpha(float(u0), float(s0), params)
    if not 0.0 < alpha < 1.0:
        raise FoldCrossedError(
            "front undefined: 4k(B+Hs)/u = %.6g outside (0, 1)" % alpha,
            failed=["0 < 4k(B+Hs)/u < 1"])
    r = math.sqrt(1.0 - alpha)
    c_dag = math.sqrt(float(u0) / (8.0 * params.k)) * (1.0 - 3.0 * r)
    return c_dag if dir == "dagger" else -c_dag


def heteroclinic(u0, s0, dir, params: ModelParams):
    """Explicit front between the layer equilibria 0 and v_plus.

    Returns (HeteroclinicJump, profile) where profile maps zeta to
    (v, q). The tanh closed form is residual-checked against the layer
    ODE at the selected speed before being handed back.
    """
    u0 = float(u0)
    s0 = float(s0)
    if dir not in DIRECTIONS:
        raise DomainError("dir must be one of %r, got %r" % (DIRECTIONS, dir))
    v_minus, v_plus = v_pm(u0, s0, params)
    alpha = _alpha(u0, s0, params)
    if alpha >= 1.0:
        # touching the fold leaves no front to connect
        raise FoldCrossedError(
            "front degenerates on the fold: 4k(B+Hs)/u = %.6g" % alpha,
            failed=["4k(B+Hs)/u < 1"])
    speed = jump_speed(u0, s0, dir, params)
    k = params.k
    kappa = v_plus * math.sqrt(k * u0) / (2.0 * math.sqrt(2.0))
    sign = 1.0 if dir == "dagger" else -1.0

    def profile(zeta):
        z = np.asarray(zeta, dtype=float)
        t = np.tanh(kappa * z)
        sech2 = 1.0 - t * t
        v = 0.5 * v_plus * (1.0 + sign * t)
        q = sign * 0.5 * v_plus * kappa * sech2
        return v, q

    _check_profile_residual(profile, u0, s0, speed, v_minus, v_plus,
                            kappa, params)
    jump = HeteroclinicJump(dir=dir, u0=u0, s0=s0, v_plus=v_plus,
                            v_minus=v_minus, speed=speed, alpha=alpha)
    return jump, profile


def _layer_acc(v, q, u0, s0, c, params):
    # q_zeta of the layer system: k*u0*v*(v-v_minus)*(v-v_plus) - c*q,
    # written in the unfactored form it takes inside the full model
    return (params.B * v - u0 * v * v * (1.0 - params.k * v)
            + params.H * v * s0 - c * q)


def _check_profile_residual(profile, u0, s0, c, v_minus, v_plus, kappa,
                            params):
    half_width = 50.0 / (math.sqrt(params.k * u0) * v_plus)
    zeta = np.linspace(-half_width, half_width, 41)
    v, q = profile(zeta)
    t = np.tanh(kappa * zeta)
    # analytic zeta-derivative of q for the tanh front
    sign = 1.0 if q[len(q) // 2] >= 0.0 else -1.0
    dq = -sign * v_plus * kappa * kappa * (1.0 - t * t) * t
    resid = np.max(np.abs(dq - _layer_acc(v, q, u0, s0, c, params)))
    if resid > _PROFILE_GATE:
        raise ConvergenceError(
            "front profile violates the layer equation: residual %.3g"
            % resid)


def melnikov(u0, s0, dir, params: ModelParams) -> MelnikovTriple:
    """Break integrals of the front at (u0, s0) in direction dir."""
    jump, profile = heteroclinic(u0, s0, dir, params)
    kappa = jump.v_plus * math.sqrt(params.k * u0) / (2.0 * math.sqrt(2.0))
    return _melnikov_integrals(profile, kappa, jump.speed, params)


def _melnikov_integrals(profile, kappa, c, params: ModelParams):
    """Weighted front integrals at an explicit exponent speed c.

    The e^{c*zeta} weight grows in the direction the front tails decay
    like e^{-2*kappa*|zeta|}; convergence therefore needs |c| < 2*kappa.
    """
    if abs(c) >= 2.0 * kappa:
        raise DivergentIntegralError(
            "weighted front integrals diverge: |c| = %.6g >= 2*kappa = %.6g"
            % (abs(c), 2.0 * kappa))

    # the weighted integrands decay at rate 2*kappa -+ c toward the
    # saturated tail and at least 4*kappa +- c toward the bare one, so the
    # truncation widths differ per side; past ~18.5/kappa the tanh profile
    # rounds to its limits and contributes exact zeros, so wider windows
    # only help through the censored-tail term reported below
    probe_v, _ = profile(np.array([-10.0, 10.0]) / kappa)
    sat = 1.0 if probe_v[1] > probe_v[0] else -1.0
    tail_log = math.log(1e14)
    z_cap = 18.5 / kappa
    w_sat = min(tail_log / (2.0 * kappa - sat * c), z_cap)
    w_bare = min(tail_log / (4.0 * kappa + sat * c), z_cap)
    censored = (math.exp(-(2.0 * kappa - sat * c) * w_sat)
                + math.exp(-(4.0 * kappa + sat * c) * w_bare))
    lo = -w_bare if sat > 0 else -w_sat
    hi = w_sat if sat > 0 else w_bare
    nodes, weights = np.polynomial.legendre.leggauss(16)

    def evaluate(n_panels):
        edges = np.linspace(lo, hi, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        zeta = (mid[:, None] + half * nodes[None, :]).ravel()
        w = np.tile(weights, n_panels) * half
        v, q = profile(zeta)
        ecz = np.exp(c * zeta)
        m_u = np.sum(w * ecz * v * v * (1.0 - params.k * v) * q)
        m_s = -np.sum(w * ecz * params.H * v * q)
        m_c = np.sum(w * ecz * q * q)
        return np.array([m_u, m_s, m_c])

    # once the censored tail dominates, panel refinement cannot buy more
    # accuracy than it already forfeits, so the settling gate follows it
    gate = max(_QUAD_RTOL, 0.1 * censored)
    n_panels = 8
    prev = evaluate(n_panels)
    for _ in range(8):
        n_panels *= 2
        cur = evaluate(n_panels)
        rel = np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), 1e-300))
        if rel < gate:
            return MelnikovTriple(M_u=float(cur[0]), M_s=float(cur[1]),
                                  M_c=float(cur[2]),
                                  quadrature_error=float(max(rel, censored)))
        prev = cur
    raise ConvergenceError(
        "front integrals failed to settle below %.0e relative after "
        "panel doubling" % gate)
