"""Pulse construction in the regime where toxicity relaxes fastest.

Both pulse types of this regime jump between the bare plane and the
vegetated slow branch. Without a plateau the jump height s_star follows
from equating the up-front and down-front speeds at u = 1; with a
plateau the water variable drops to an interior value u_star fixed by a
cubic-in-disguise scalar equation, and the orbit tracks an arc of the
superslow vegetated flow between the two fronts.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .cubics import cubic_v_roots
from .errors import ConditionViolated, ConvergenceError, NoConnectionError
from .layer import jump_speed, v_pm
from .model import ModelParams

_PAD = 1e-9


def solve_sstar_noplateau(params: ModelParams):
    """Jump height s_star that equalises the two front speeds at u = 1.

    Requires 5/9 < 4kB < 8/9; the closed form is cross-checked against
    the front speeds before being returned.
    """
    w = 4.0 * params.k * params.B
    if w <= 5.0 / 9.0:
        raise ConditionViolated(
            "front matching needs 4kB > 5/9, got 4kB = %.6g" % w,
            failed=["4kB > 5/9"])
    if w >= 8.0 / 9.0:
        raise ConditionViolated(
            "front matching needs 4kB < 8/9, got 4kB = %.6g" % w,
            failed=["4kB < 8/9"])
    s_star = (-1.0 + 3.0 * math.sqrt(1.0 - w)) / (9.0 * params.H * params.k)
    up = jump_speed(1.0, s_star, "dagger", params)
    down = jump_speed(1.0, 0.0, "diamond", params)
    if abs(up - down) > 1e-12:
        raise ConvergenceError(
            "front speeds fail to match at s_star: |%.17g - %.17g| > 1e-12"
            % (up, down))
    return s_star


def v2_of_u(u, params: ModelParams):
    """Toxicity-equilibrium biomass on the upper vegetated branch at u.

    The defining cubic has one irrelevant root above 1/H; the branch
    value is the largest root inside (1/(2k), 1/H).
    """
    # padded window: boundary parameter choices park the equilibrium
    # exactly on the branch edge 1/(2k)
    lo = (1.0 - _PAD) / (2.0 * params.k)
    hi = (1.0 + _PAD) / params.H
    inside = [r for r in cubic_v_roots(u, params).roots if lo < r < hi]
    if not inside:
        raise ConditionViolated(
            "no toxicity equilibrium on the upper branch at u = %.6g" % u,
            failed=["upper-branch equilibrium exists"])
    return max(inside)


def s2_of_u(u, params: ModelParams):
    """Equilibrium toxicity value paired with v2_of_u."""
    v2 = v2_of_u(u, params)
    return params.B * v2 / (1.0 - params.H * v2)


def upper_branch_s_flow(s, u, params: ModelParams):
    """Sign of the slow toxicity drift on the vegetated branch.

    Positive values push s upward; a zero is an equilibrium that blocks
    downward passage.
    """
    vp = v_pm(u, s, params)[1]
    return s * (1.0 - params.H * vp) - params.B * vp


def noplateau_flow_blocked(params: ModelParams, s_star=None):
    """True when the downward toxicity passage at u = 1 hits an equilibrium.

    The drift is negative at s = 0 and increases with s, so it suffices
    to check its sign at the top of the travelled range.
    """
    if s_star is None:
        s_star = solve_sstar_noplateau(params)
    return upper_branch_s_flow(s_star, 1.0, params) >= 0.0


def _plateau_poly(x, params: ModelParams):
    # scalar equation for x = 3*U_star on (1, 3)
    return (24.0 * params.k * (1.0 - x)
            + params.H * (5.0 - x) ** 2 * (1.0 + x))


def solve_plateau_case_i(params: ModelParams):
    """Plateau pulse scalars (U_star, u_star, s_star, c_pred).

    U_star is the unique root in (1/3, 1) of the front/plateau matching
    equation; u_star and s_star follow in closed form, and c_pred is the
    down-front speed at the plateau's base. Window checks carry a 1e-9
    pad so boundary parameter choices are admitted.
    """
    k, H, B = params.k, params.H, params.B
    w = 4.0 * k * B
    if w >= 1.0:
        raise ConditionViolated(
            "plateau matching needs 4kB < 1, got 4kB = %.6g" % w,
            failed=["4kB < 1"])

    if _plateau_poly(3.0, params) >= 0.0:
        # no root below x = 3; the lower interval bound sqrt(H/(2k)) then
        # exceeds 1 and cannot be met by any U_star < 1
        raise ConditionViolated(
            "plateau matching equation has no root with U_star < 1 at "
            "H/k = %.6g" % (H / k), failed=["sqrt(H/(2k)) < U_star"])
    x = brentq(_plateau_poly, 1.0, 3.0, args=(params,),
               xtol=1e-14, rtol=4.0 * np.finfo(float).eps)
    U_star = x / 3.0

    lower = math.sqrt(H / (2.0 * k))
    upper = math.sqrt(1.0 - w)
    failed = []
    if U_star < lower - _PAD:
        failed.append("sqrt(H/(2k)) < U_star")
    if U_star > upper + _PAD:
        failed.append("U_star < sqrt(1-4kB)")
    if failed:
        raise ConditionViolated(
            "plateau root U_star = %.6g misses (%.6g, %.6g)"
            % (U_star, lower, upper), failed=failed)

    u_star = w / (1.0 - U_star * U_star)
    gap = 5.0 - 3.0 * U_star
    s_star = B * gap / (6.0 * k - H * gap)

    # the same value must come out of the branch-equilibrium cubic
    s2 = s2_of_u(u_star, params)
    if abs(s_star - s2) > 1e-10 * max(1.0, abs(s2)):
        raise ConvergenceError(
            "plateau s_star = %.17g disagrees with the branch equilibrium "
            "value %.17g" % (s_star, s2))

    c_pred = jump_speed(u_star, 0.0, "diamond", params)
    return U_star, u_star, s_star, c_pred


def _arc_rhs(u, params):
    # u-acceleration along the superslow vegetated flow
    v2 = v2_of_u(u, params)
    return u * v2 * v2 - params.A * (1.0 - u)


def plateau_arc(u_star, params: ModelParams, n_half=80):
    """Polyline of the superslow plateau arc through (u_star, +-p_star).

    The flow is Newtonian in u, so the arc is traced as a level set of
    its conserved energy rather than by time integration: starting at
    p_star = sqrt(A)(u_star - 1) < 0, u decreases to the turning value
    where the energy is exhausted, then returns with p > 0. Points carry
    the branch values (v2(u), 0, s2(u)) in the remaining components.
    """
    u_star = float(u_star)
    p_star = math.sqrt(params.A) * (u_star - 1.0)
    if p_star == 0.0:
        raise NoConnectionError(
            "plateau arc degenerates at u_star = 1: no energy to travel")

    def energy(u):
        # p^2 available at u; quad handles the smooth branch integrand
        shift, err = quad(_arc_rhs, u_star, u, args=(params,),
                          epsabs=1e-13, epsrel=1e-12, limit=200)
        return p_star * p_star + 2.0 * shift, err

    # march down from u_star until the energy runs out, guarding against
    # the saddle where the acceleration itself changes sign
    step = 1e-4 * u_star
    u_hi = u_star
    u_lo = None
    while True:
        u_try = u_hi - step
        if u_try <= 0.0:
            raise NoConnectionError(
                "plateau arc never turns: energy stays positive down to u = 0")
        if _arc_rhs(u_try, params) <= 0.0:
            raise NoConnectionError(
                "plateau arc reaches the superslow saddle before turning; "
                "no closed plateau exists at these parameters")
        if energy(u_try)[0] <= 0.0:
            u_lo = u_try
            break
        u_hi = u_try
        step *= 1.6

    u_turn = brentq(lambda u: energy(u)[0], u_lo, u_hi,
                    xtol=1e-15, rtol=4.0 * np.finfo(float).eps)

    # cluster samples near the turning point, where p ~ sqrt(u - u_turn)
    theta = np.linspace(0.0, 1.0, n_half + 1)
    u_desc = u_turn + (u_star - u_turn) * theta[::-1] ** 2
    rows = []

    def branch_row(u, p):
        v2 = v2_of_u(u, params)
        s2 = params.B * v2 / (1.0 - params.H * v2)
        return (u, p, v2, 0.0, s2)

    for i, u in enumerate(u_desc):
        if i == 0:
            p = p_star
        else:
            e = max(energy(u)[0], 0.0)
            p = -math.sqrt(e)
        rows.append(branch_row(u, p))
    for u in u_desc[::-1][1:]:
        e = max(energy(u)[0], 0.0)
        p = math.sqrt(e)
        rows.append(branch_row(u, p))
    # land exactly on the mirrored start point
    rows[-1] = branch_row(u_star, -p_star)
    return np.array(rows), u_turn
