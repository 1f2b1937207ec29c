"""Pulse construction in the regime where toxicity relaxes slowest.

Here the toxicity value s0 carried by the up-front is a free parameter
of the slow dynamics rather than a matched equilibrium height. The orbit
rides the vegetated branch between two front jumps whose base points
u0_pm(c, s0) must coincide with the turning value u_star of the slow
planar flow; equating them at s = s0 (up) and s = 0 (down) pins the pair
(s0, c).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConditionViolated,
    ConvergenceError,
    DomainError,
    NoConnectionError,
)
from .layer import jump_speed, v_pm
from .model import ModelParams


def case_ii_n1_curve(v, params: ModelParams):
    """Point (u, s) of the vegetated superslow curve at biomass v,
    plus its landmarks.

    Returns (u, s, v_max, s_max, v_hat_minus, v_hat_plus); the hats are
    the zero crossings of s(v) and come back as NaN when the curve never
    reaches positive s.
    """
    v = float(v)
    if v < 0.0:
        raise DomainError("biomass must be nonnegative, got %g" % v)
    A, B, H, k = params.A, params.B, params.H, params.k
    u = A / (A + v * v)
    s = (-B + A * v * (1.0 - k * v) / (A + v * v)) / H

    v_max = A * k * (-1.0 + math.sqrt(1.0 + 1.0 / (A * k * k)))
    s_max = (-B + v_max / 2.0) / H

    disc = 1.0 - 4.0 * B * (A * k + B) / A
    if disc >= 0.0:
        r = math.sqrt(disc)
        v_hat_minus = A * (1.0 - r) / (2.0 * (A * k + B))
        v_hat_plus = A * (1.0 + r) / (2.0 * (A * k + B))
    else:
        v_hat_minus = v_hat_plus = float("nan")
    return u, s, v_max, s_max, v_hat_minus, v_hat_plus


def _beta(s0, params):
    return params.B + params.H * s0


def _check_u1_preconditions(s0, params):
    s0 = float(s0)
    if s0 < 0.0:
        raise DomainError("toxicity level must be nonnegative, got %g" % s0)
    beta = _beta(s0, params)
    failed = []
    if 4.0 * params.k * beta >= 1.0:
        failed.append("4k(B+Hs0) < 1")
    else:
        bound = beta / (params.k * (1.0 - 4.0 * params.k * beta))
        if params.A <= bound:
            failed.append("A > (B+Hs0)/(k(1-4k(B+Hs0)))")
    if failed:
        raise ConditionViolated(
            "vegetated curve misses the upper branch at s0 = %.6g" % s0,
            failed=failed)
    return beta


def case_ii_u1_plus(s0, params: ModelParams):
    """Water level where the vegetated superslow curve meets the upper
    slow branch at toxicity s0."""
    beta = _check_u1_preconditions(s0, params)
    A, k = params.A, params.k
    # larger biomass root of (beta + A*k) v^2 - A v + beta*A = 0
    w = beta + A * k
    disc = A * A - 4.0 * beta * A * w
    v_big = (A + math.sqrt(max(disc, 0.0))) / (2.0 * w)
    u1 = A / (A + v_big * v_big)

    if not u1 < 1.0:
        raise ConvergenceError("intersection value u1_plus = %.17g is "
                               "not below 1" % u1)
    r_water = u1 * v_big * v_big - A * (1.0 - u1)
    r_branch = beta - u1 * v_big * (1.0 - k * v_big)
    if max(abs(r_water), abs(r_branch)) > 1e-10:
        raise ConvergenceError(
            "intersection residuals too large: water %.3g, branch %.3g"
            % (r_water, r_branch))
    return u1


def case_ii_V_plus(u, s0, params: ModelParams):
    """Potential of the slow planar flow on the upper vegetated branch."""
    u = float(u)
    beta = _beta(float(s0), params)
    A, k = params.A, params.k
    if u < 4.0 * k * beta:
        raise DomainError(
            "potential undefined below the branch fold: u = %.6g < 4k(B+Hs0)"
            " = %.6g" % (u, 4.0 * k * beta))
    root = math.sqrt(u * (u - 4.0 * k * beta))
    return ((A + beta / k) * u
            - (A + 1.0 / (2.0 * k * k)) * u * u / 2.0
            - (u - 2.0 * k * beta) * root / (4.0 * k * k)
            + 2.0 * beta * beta * math.log(math.sqrt(u)
                                           + math.sqrt(u - 4.0 * k * beta)))


def case_ii_u_star(s0, params: ModelParams):
    """Water level where the bare and vegetated slow separatrices meet.

    Solves sqrt(A)(u-1) = -sgn(u - u1_plus) * sqrt(2 V+(u1_plus) - 2 V+(u))
    on (u1_plus, 1) by bracketed root-finding.
    """
    s0 = float(s0)
    u1 = case_ii_u1_plus(s0, params)
    if u1 >= 1.0:
        return 1.0
    v_top = case_ii_V_plus(u1, s0, params)
    sqrtA = math.sqrt(params.A)

    def gap(u):
        return max(2.0 * v_top - 2.0 * case_ii_V_plus(u, s0, params), 0.0)

    def f(u):
        sgn = 0.0 if u == u1 else math.copysign(1.0, u - u1)
        return sqrtA * (u - 1.0) + sgn * math.sqrt(gap(u))

    if f(u1) >= 0.0 or f(1.0) <= 0.0:
        raise NoConnectionError(
            "separatrices do not cross between u1_plus = %.6g and 1" % u1)
    u_star = brentq(f, u1, 1.0, xtol=1e-15,
                    rtol=4.0 * np.finfo(float).eps)
    if abs(f(u_star)) > 1e-10:
        raise ConvergenceError(
            "separatrix matching residual %.3g above 1e-10 at u_star"
            % f(u_star))
    return u_star


def case_ii_u0_pm(c, s0, params: ModelParams):
    """Front base points (u0_plus, u0_minus) selected by speed c at
    toxicity s0: the up-front runs at u0_plus, the down-front at
    u0_minus."""
    c = float(c)
    s0 = float(s0)
    if s0 < 0.0:
        raise DomainError("toxicity level must be nonnegative, got %g" % s0)
    beta = _beta(s0, params)
    cmax = math.sqrt(beta / 2.0)
    if not 0.0 < c < cmax:
        raise ConditionViolated(
            "front speed %.6g outside the admissible window (0, %.6g)"
            % (c, cmax), failed=["0 < c < sqrt((B+Hs0)/2)"])
    k = params.k
    root = 3.0 * c * math.sqrt(c * c + 4.0 * beta)
    base = 5.0 * c * c + 18.0 * beta
    u0_plus = 0.25 * k * (base - root)
    u0_minus = 0.25 * k * (base + root)

    mid = 4.5 * k * beta
    if not u0_plus < mid < u0_minus:
        raise ConvergenceError(
            "front base points %.17g, %.17g fail to straddle (9/2)k(B+Hs0)"
            % (u0_plus, u0_minus))
    up = jump_speed(u0_plus, s0, "dagger", params)
    down = jump_speed(u0_minus, s0, "diamond", params)
    if max(abs(up - c), abs(down - c)) > 1e-10:
        raise ConvergenceError(
            "front speeds %.17g, %.17g fail to recover c = %.17g"
            % (up, down, c))
    return u0_plus, u0_minus


def _matching_residual(s0, c, params):
    f1 = case_ii_u0_pm(c, s0, params)[0] - case_ii_u_star(s0, params)
    f2 = case_ii_u0_pm(c, 0.0, params)[1] - case_ii_u_star(0.0, params)
    return np.array([f1, f2])


def solve_matching_case_ii(params: ModelParams):
    """Toxicity carry-over s0 and speed c matching the two front jumps
    to the slow separatrices.

    Damped Newton on the 2x2 system, seeded at the midpoint of the
    admissible rectangle and retried from a coarse grid on failure.
    """
    A, B, k = params.A, params.B, params.k
    if 4.0 * k * B >= 1.0:
        raise ConditionViolated(
            "matching needs 4kB < 1, got %.6g" % (4.0 * k * B),
            failed=["4kB < 1"])
    if A <= 4.0 * B * B / (1.0 - 4.0 * k * B):
        raise ConditionViolated(
            "matching needs A > 4B^2/(1-4kB), got A = %.6g" % A,
            failed=["A > 4B^2/(1-4kB)"])

    s_max = case_ii_n1_curve(0.0, params)[3]
    if s_max <= 0.0:
        raise ConditionViolated(
            "vegetated curve never reaches positive toxicity: s_max = %.6g"
            % s_max, failed=["s_max > 0"])
    c_max = math.sqrt(B / 2.0)

    seeds = [(0.5 * s_max, 0.5 * c_max)]
    for fs in (0.2, 0.5, 0.8):
        for fc in (0.25, 0.5, 0.75):
            if (fs, fc) != (0.5, 0.5):
                seeds.append((fs * s_max, fc * c_max))

    solution = None
    for s0_seed, c_seed in seeds:
        try:
            solution = _newton_2x2(s0_seed, c_seed, params)
        except (ConditionViolated, DomainError, ConvergenceError,
                NoConnectionError, ValueError):
            continue
        if solution is not None:
            break
    if solution is None:
        raise NoConnectionError(
            "front/separatrix matching failed from every Newton seed")
    s0, c = solution

    if not 0.0 < c < c_max:
        raise ConditionViolated(
            "matched speed %.6g falls outside (0, sqrt(B/2))" % c,
            failed=["0 < c < sqrt(B/2)"])
    if s0 <= 0.0:
        raise ConditionViolated(
            "matched toxicity carry-over %.6g is not positive" % s0,
            failed=["s0 > 0"])
    # the vegetated passage must keep draining toxicity down to s0
    u1 = case_ii_u1_plus(s0, params)
    v_land = v_pm(u1, s0, params)[1]
    s_eq = B * v_land / (1.0 - params.H * v_land)
    if s_eq <= s0:
        raise ConditionViolated(
            "toxicity drift reverses on the vegetated branch: equilibrium "
            "%.6g does not exceed s0 = %.6g" % (s_eq, s0),
            failed=["B v+(u1_plus)/(1 - H v+(u1_plus)) > s0"])
    return s0, c


def _newton_2x2(s0, c, params, tol=1e-12, max_iter=60):
    f = _matching_residual(s0, c, params)
    for _ in range(max_iter):
        norm = np.max(np.abs(f))
        if norm < tol:
            return s0, c
        h_s = 1e-7 * max(abs(s0), 1e-3)
        h_c = 1e-7 * max(abs(c), 1e-3)
        j00 = (_matching_residual(s0 + h_s, c, params)[0] - f[0]) / h_s
        j01 = (_matching_residual(s0, c + h_c, params)[0] - f[0]) / h_c
        # the second equation depends on c alone
        j11 = (_matching_residual(s0, c + h_c, params)[1] - f[1]) / h_c
        det = j00 * j11
        if det == 0.0 or not np.isfinite(det):
            return None
        dc = -f[1] / j11
        ds = -(f[0] + j01 * dc) / j00
        lam = 1.0
        while lam > 1e-6:
            try:
                trial = _matching_residual(s0 + lam * ds, c + lam * dc,
                                           params)
            except (ConditionViolated, DomainError, NoConnectionError):
                lam *= 0.5
                continue
            if np.max(np.abs(trial)) < norm or lam <= 1e-5:
                s0, c, f = s0 + lam * ds, c + lam * dc, trial
                break
            lam *= 0.5
        else:
            return None
    if np.max(np.abs(f)) < 1e-10:
        return s0, c
    return None
