"""Boundary-value solver and continuation for travelling pulse profiles.

The pulse is sought on a truncated interval of the slow frame as the
five components (u, p, v, q, s) plus two quadrature components that
carry one localized phase condition per vegetation interface.  The
rest state (1, 0, 0, 0, 0) is hyperbolic for c > 0 with three unstable
and two stable directions, so two projection conditions on the left
and three on the right close the system together with the phase pair
and two free scalars: the speed c (or one model parameter during
continuation) and the gain of a smooth coordinate stretch supported
between the interfaces.  The stretch hands Newton's method the nearly
neutral degree of freedom it needs, the interface separation, as an
explicit unknown; without it the iteration stalls along that
direction.  Cold starts are composed piecewise from a singular
skeleton (exact exponential tails, front transitions, slow passages
allocated in z through their reduced flows) and converge through a few
reseeding rounds at a relaxed tolerance, each round rebuilding the
stretch geometry from the current iterate, before a final solve at the
requested tolerance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import solve_bvp
from scipy.interpolate import CubicSpline

from .casei import plateau_arc
from .caseii import (
    case_ii_n1_curve,
    case_ii_u1_plus,
    case_ii_u_star,
    case_ii_V_plus,
)
from .errors import (
    ConvergenceError,
    DomainError,
    IntervalTooShortError,
    StructuralError,
)
from .layer import heteroclinic, v_pm
from .model import ModelParams, derive_tw_params, tw_rhs_slow_arrays

ORIGIN = np.array([1.0, 0.0, 0.0, 0.0, 0.0])

# tails are long enough that the boundary deviation e^{-rate * tail}
# falls below 1e-8 before the safety margin is applied
_TAIL_DECAY = math.log(1e8)
_TAIL_MARGIN = 1.25

_N_FRONT = 301
_N_LEG = 241
_N_FLOW = 361
# half-width of a front piece in units of the interface steepness kappa;
# tanh saturates to its limit within 3e-10 there
_FRONT_SAT = 11.0

_FREE_CHOICES = ("c", "k", "delta")

# cap on the stretch bump so z'(sigma) = 1 + (e^mu - 1) chi stays
# positive however far mu falls, keeping the map invertible
_CHI_MAX = 0.999
_MU_CLIP = 60.0
# a round is settled once it converged with the stretch this mild
_MU_SETTLED = 0.4
# reseeding rounds run at this tolerance and node budget
_ROUND_TOL = 1e-6
_ROUND_NODES = 30000
_MAX_ROUNDS = 8
# interfaces closer than this many interface lengths cannot carry
# separate phase windows and share a single global one instead
_COMPACT_RATIO = 8.0
# positivity floors for boundary projections while Newton wanders
_C_FLOOR = 1e-6
_D_FLOOR = 1e-12


@dataclass(frozen=True)
class OriginLinearization:
    """Eigenstructure of the rest state (1, 0, 0, 0, 0).

    Eigenvalues are ordered (u+, u-, v+, v-, s); right eigenvectors are
    the matching columns of ``right_vectors`` and ``left_vectors`` holds
    the inverse, so row i pairs to eigenvalue i.  ``cond`` is the
    condition number of the eigenvector basis; a resonance between the
    toxicity rate delta/eps and a v-rate degrades it.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    unstable: tuple
    stable: tuple
    cond: float

    @property
    def stable_left(self):
        """Rows annihilating the unstable subspace deviation."""
        return self.left_vectors[list(self.stable)]

    @property
    def unstable_left(self):
        """Rows annihilating the stable subspace deviation."""
        return self.left_vectors[list(self.unstable)]


def linearize_at_origin(params: ModelParams, c,
                        delta=None) -> OriginLinearization:
    """Analytic eigen-decomposition of the travelling-frame rest state.

    The Jacobian there is block triangular: an (u, p) block with rates
    (-eps c +- sqrt(eps^2 c^2 + 4A))/2, a (v, q) block with rates
    (-c +- sqrt(c^2 + 4B))/(2 eps), and the toxicity rate delta/eps
    whose eigenvector is exactly the s-axis.  delta defaults to the
    travelling-frame value 1/(c D).  Requires c > 0; a near resonance
    delta = eps * rate in the (v, q) block leaves the basis
    ill-conditioned, which is reported in ``cond`` and warned about.
    """
    if c <= 0.0:
        raise DomainError("linearization requires a positive speed, "
                          "got c=%g" % c)
    if delta is None:
        delta = derive_tw_params(params, c).delta
    if delta <= 0.0:
        raise DomainError("delta must be positive, got %g" % delta)
    A, B, eps = params.A, params.B, params.eps

    disc_u = math.sqrt(eps * eps * c * c + 4.0 * A)
    lam_up = 0.5 * (-eps * c + disc_u)
    lam_um = 0.5 * (-eps * c - disc_u)
    disc_v = math.sqrt(c * c + 4.0 * B)
    lam_vp = 0.5 * (-c + disc_v) / eps
    lam_vm = 0.5 * (-c - disc_v) / eps
    lam_s = delta / eps
    lams = np.array([lam_up, lam_um, lam_vp, lam_vm, lam_s])

    right = np.zeros((5, 5))
    right[:, 0] = (1.0, lam_up, 0.0, 0.0, 0.0)
    right[:, 1] = (1.0, lam_um, 0.0, 0.0, 0.0)
    coupling = np.empty(2)
    for col, lam in ((2, lam_vp), (3, lam_vm)):
        den = delta - eps * lam
        if den == 0.0:
            den = 1e-300
        coupling[col - 2] = delta * B / den
        right[:, col] = (0.0, 0.0, 1.0, eps * lam, coupling[col - 2])
    right[:, 4] = (0.0, 0.0, 0.0, 0.0, 1.0)

    left = np.zeros((5, 5))
    gap_u = lam_up - lam_um
    left[0] = (-lam_um / gap_u, 1.0 / gap_u, 0.0, 0.0, 0.0)
    left[1] = (lam_up / gap_u, -1.0 / gap_u, 0.0, 0.0, 0.0)
    gap_v = eps * (lam_vp - lam_vm)
    left[2] = (0.0, 0.0, -eps * lam_vm / gap_v, 1.0 / gap_v, 0.0)
    left[3] = (0.0, 0.0, eps * lam_vp / gap_v, -1.0 / gap_v, 0.0)
    left[4, 2] = -(coupling[0] * left[2, 2] + coupling[1] * left[3, 2])
    left[4, 3] = -(coupling[0] * left[2, 3] + coupling[1] * left[3, 3])
    left[4, 4] = 1.0

    cond = float(np.linalg.cond(right))
    if not np.isfinite(cond) or cond > 1e10:
        warnings.warn(
            "rest-state eigenbasis is ill-conditioned (cond=%.3g); "
            "delta=%g resonates with a fast rate" % (cond, delta),
            RuntimeWarning, stacklevel=2)
    return OriginLinearization(
        eigenvalues=lams, right_vectors=right, left_vectors=left,
        unstable=(0, 2, 4), stable=(1, 3), cond=cond)


@dataclass(frozen=True)
class SeedProfile:
    """Piecewise initial guess: mesh z, states (5, m), suggested speed."""

    z: np.ndarray
    states: np.ndarray
    c: float


def _as_profile(init):
    """Normalize an initial profile to (z, states) arrays."""
    if isinstance(init, (TravellingWaveSolution, SeedProfile)):
        z, states = init.z, init.states
    else:
        try:
            z, states = init
        except (TypeError, ValueError):
            raise StructuralError(
                "initial profile must be a solution, a seed, or a "
                "(z, states) pair") from None
        z = np.asarray(z, dtype=float)
        states = np.asarray(states, dtype=float)
    if z.ndim != 1 or states.shape != (5, z.size):
        raise StructuralError(
            "profile arrays must be z (m,) and states (5, m); got %s "
            "and %s" % (np.shape(z), np.shape(states)))
    if z.size < 10:
        raise StructuralError("profile needs at least 10 mesh points")
    if np.any(np.diff(z) <= 0.0):
        raise StructuralError("profile mesh must be strictly increasing")
    return z, states


def _graded(length, n, dense_end):
    """Grid on [0, length] with quadratic clustering at one end."""
    t = np.linspace(0.0, 1.0, n)
    if dense_end == "right":
        return length * (1.0 - (1.0 - t) ** 2)
    return length * t ** 2


def _front_piece(u0, p0, s0, direction, params):
    """Front transition: local z grid (centered shifted to 0) and states."""
    jump, profile = heteroclinic(u0, s0, direction, params)
    kappa = math.sqrt(params.k * u0) * jump.v_plus / (2.0 * math.sqrt(2.0))
    zeta = np.linspace(-_FRONT_SAT / kappa, _FRONT_SAT / kappa, _N_FRONT)
    v, q = profile(zeta)
    z = params.eps * (zeta - zeta[0])
    n = z.size
    states = np.vstack([np.full(n, u0), np.full(n, p0), v, q,
                        np.full(n, s0)])
    return z, states


def _flow_allocated(clock, rate, floor_frac=0.02):
    """Map a monotone clock variable to z through its reduced flow rate.

    dz = |d clock| / max(|rate|, floor) with the floor relative to the
    largest rate along the piece; the floor keeps the allocation finite
    across equilibria that the finite-scale-separation orbit crosses.
    """
    scale = np.abs(rate).max()
    if scale <= 0.0:
        raise DomainError("slow piece has an identically zero flow")
    floor = floor_frac * scale
    mid = 0.5 * (np.abs(rate[1:]) + np.abs(rate[:-1]))
    dz = np.abs(np.diff(clock)) / np.maximum(mid, floor)
    return np.concatenate([[0.0], np.cumsum(dz)])


def _upper_branch(u0, s_vals, params):
    return np.array([v_pm(u0, float(si), params)[1] for si in s_vals])


def _descent_piece(u0, p0, s_from, params, delta):
    """Vegetated-branch toxicity descent from s_from to 0 at frozen u0."""
    ru = delta / params.eps
    s_vals = np.linspace(s_from, 0.0, _N_FLOW)
    v_vals = _upper_branch(u0, s_vals, params)
    g = s_vals - (params.B + params.H * s_vals) * v_vals
    z = _flow_allocated(s_vals, ru * g)
    n = s_vals.size
    q_vals = params.eps * np.gradient(v_vals, z)
    states = np.vstack([np.full(n, u0), np.full(n, p0), v_vals, q_vals,
                        s_vals])
    return z, states


def _seed_case_i_no_plateau(skel, params, delta):
    eps = params.eps
    c = skel.c_pred
    s_star = skel.s_star
    ru = delta / eps
    sqrt_a = math.sqrt(params.A)

    pieces = []
    tail_l = _TAIL_DECAY / min(sqrt_a, ru) * _TAIL_MARGIN
    z_leg = _graded(tail_l, _N_LEG, "right")
    s_leg = s_star * np.exp(ru * (z_leg - tail_l))
    zeros = np.zeros(z_leg.size)
    ones = np.ones(z_leg.size)
    pieces.append((z_leg, np.vstack([ones, zeros, zeros, zeros, s_leg])))

    pieces.append(_front_piece(1.0, 0.0, s_star, "dagger", params))
    pieces.append(_descent_piece(1.0, 0.0, s_star, params, delta))
    pieces.append(_front_piece(1.0, 0.0, 0.0, "diamond", params))

    tail_r = _TAIL_DECAY / sqrt_a * _TAIL_MARGIN
    z_out = _graded(tail_r, _N_LEG, "left")
    zeros = np.zeros(z_out.size)
    pieces.append((z_out, np.vstack([np.ones(z_out.size), zeros, zeros,
                                     zeros, zeros])))
    return pieces, c


def _seed_case_i_plateau(skel, params, delta):
    eps = params.eps
    c = skel.c_pred
    s_star, u_star = skel.s_star, skel.u_star
    ru = delta / eps
    sqrt_a = math.sqrt(params.A)
    p_star = sqrt_a * (u_star - 1.0)

    pieces = []
    tail_l = _TAIL_DECAY / min(sqrt_a, ru) * _TAIL_MARGIN
    z_leg = _graded(tail_l, _N_LEG, "right")
    decay = np.exp(sqrt_a * (z_leg - tail_l))
    u_leg = 1.0 - (1.0 - u_star) * decay
    p_leg = -sqrt_a * (1.0 - u_star) * decay
    s_leg = s_star * np.exp(ru * (z_leg - tail_l))
    zeros = np.zeros(z_leg.size)
    pieces.append((z_leg, np.vstack([u_leg, p_leg, zeros, zeros, s_leg])))

    pieces.append(_front_piece(u_star, p_star, s_star, "dagger", params))

    rows, _ = plateau_arc(u_star, params)
    u_a, p_a, v_a, _, s_a = rows.T
    # u is the clock away from the turning point, p near it; the two
    # allocations agree because dp = u'' dz along the arc
    ddu = u_a * v_a ** 2 - params.A * (1.0 - u_a)
    dz = np.empty(u_a.size - 1)
    for i in range(dz.size):
        pm = 0.5 * (p_a[i] + p_a[i + 1])
        um = 0.5 * (ddu[i] + ddu[i + 1])
        if abs(pm) >= 1e-3 * np.abs(p_a).max():
            dz[i] = (u_a[i + 1] - u_a[i]) / pm
        else:
            dz[i] = (p_a[i + 1] - p_a[i]) / um
    if np.any(dz <= 0.0):
        raise ConvergenceError("plateau arc allocation is not monotone")
    z_arc = np.concatenate([[0.0], np.cumsum(dz)])
    q_arc = eps * np.gradient(v_a, z_arc)
    pieces.append((z_arc, np.vstack([u_a, p_a, v_a, q_arc, s_a])))

    pieces.append(_descent_piece(u_star, -p_star, s_star, params, delta))
    pieces.append(_front_piece(u_star, -p_star, 0.0, "diamond", params))

    tail_r = _TAIL_DECAY / sqrt_a * _TAIL_MARGIN
    z_out = _graded(tail_r, _N_LEG, "left")
    decay = np.exp(-sqrt_a * z_out)
    u_out = 1.0 - (1.0 - u_star) * decay
    p_out = sqrt_a * (1.0 - u_star) * decay
    zeros = np.zeros(z_out.size)
    pieces.append((z_out, np.vstack([u_out, p_out, zeros, zeros, zeros])))
    return pieces, c


def _potential_leg(u_from, u_to, s0, u1, sign, params, delta):
    """Vegetated slow passage with p set by the layer potential."""
    eps = params.eps
    t = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, _N_FLOW)))
    u_vals = u_from + (u_to - u_from) * t
    v_ref = 2.0 * case_ii_V_plus(u1, s0, params)
    p_vals = np.empty(u_vals.size)
    v_vals = np.empty(u_vals.size)
    for i, ui in enumerate(u_vals):
        gap = v_ref - 2.0 * case_ii_V_plus(float(ui), s0, params)
        p_vals[i] = sign * math.sqrt(max(gap, 0.0))
        v_vals[i] = v_pm(float(ui), s0, params)[1]
    z = _flow_allocated(u_vals, p_vals)
    q_vals = eps * np.gradient(v_vals, z)
    n = u_vals.size
    states = np.vstack([u_vals, p_vals, v_vals, q_vals, np.full(n, s0)])
    return z, states


def _seed_case_ii(skel, params, delta):
    eps = params.eps
    c = skel.c_pred
    s0 = skel.s0
    ru = delta / eps
    sqrt_a = math.sqrt(params.A)
    ustar_s0 = case_ii_u_star(s0, params)
    ustar_0 = case_ii_u_star(0.0, params)
    u1_s0 = case_ii_u1_plus(s0, params)
    u1_0 = case_ii_u1_plus(0.0, params)

    pieces = []
    tail_l = _TAIL_DECAY / min(sqrt_a, ru) * _TAIL_MARGIN
    z_leg = _graded(tail_l, _N_LEG, "right")
    decay = np.exp(sqrt_a * (z_leg - tail_l))
    u_leg = 1.0 - (1.0 - ustar_s0) * decay
    p_leg = -sqrt_a * (1.0 - ustar_s0) * decay
    s_leg = s0 * np.exp(ru * (z_leg - tail_l))
    zeros = np.zeros(z_leg.size)
    pieces.append((z_leg, np.vstack([u_leg, p_leg, zeros, zeros, s_leg])))

    p_dag = sqrt_a * (ustar_s0 - 1.0)
    pieces.append(_front_piece(ustar_s0, p_dag, s0, "dagger", params))
    pieces.append(_potential_leg(ustar_s0, u1_s0, s0, u1_s0, -1.0, params,
                                 delta))

    v_land = v_pm(u1_s0, s0, params)[1]
    v_end = case_ii_n1_curve(v_land, params)[5]
    v_grid = np.linspace(v_land, v_end, _N_FLOW)
    n1_u = np.empty(v_grid.size)
    n1_s = np.empty(v_grid.size)
    for i, vi in enumerate(v_grid):
        n1_u[i], n1_s[i] = case_ii_n1_curve(float(vi), params)[:2]
    g = n1_s - (params.B + params.H * n1_s) * v_grid
    z_n1 = _flow_allocated(n1_s, ru * g)
    p_n1 = np.gradient(n1_u, z_n1)
    q_n1 = eps * np.gradient(v_grid, z_n1)
    pieces.append((z_n1, np.vstack([n1_u, p_n1, v_grid, q_n1, n1_s])))

    pieces.append(_potential_leg(u1_0, ustar_0, 0.0, u1_0, 1.0, params,
                                 delta))
    p_dia = sqrt_a * (1.0 - ustar_0)
    pieces.append(_front_piece(ustar_0, p_dia, 0.0, "diamond", params))

    tail_r = _TAIL_DECAY / sqrt_a * _TAIL_MARGIN
    z_out = _graded(tail_r, _N_LEG, "left")
    decay = np.exp(-sqrt_a * z_out)
    u_out = 1.0 - (1.0 - ustar_0) * decay
    p_out = sqrt_a * (1.0 - ustar_0) * decay
    zeros = np.zeros(z_out.size)
    pieces.append((z_out, np.vstack([u_out, p_out, zeros, zeros, zeros])))
    return pieces, c


def _consistent_s(z, v, params, delta):
    """Bounded toxicity channel along a given vegetation profile.

    Integrates ds/dz = ru (1 - H v) s - ru B v backward from s = 0 at
    the right end with a one-step exponential method that is exact for
    frozen coefficients.  Backward is the bounded direction: the
    channel grows ahead of the pulse at rate ru, so a forward reading
    amplifies any front-crossing mismatch by e^{ru z} while the sweep
    damps it and lands on the one solution that decays both ways.
    """
    ru = delta / params.eps
    a = ru * (1.0 - params.H * v)
    b = -ru * params.B * v
    s = np.zeros(z.size)
    for i in range(z.size - 2, -1, -1):
        h = z[i + 1] - z[i]
        am = 0.5 * (a[i] + a[i + 1])
        bm = 0.5 * (b[i] + b[i + 1])
        if am * h > 1e-12:
            e = math.exp(-am * h)
            s[i] = e * s[i + 1] + (bm / am) * (e - 1.0)
        else:
            s[i] = s[i + 1] - h * (am * s[i + 1] + bm)
    return s


def seed_from_skeleton(skeleton, params: ModelParams,
                       delta) -> SeedProfile:
    """Compose a z-parameterized initial profile from a singular skeleton.

    Exponential tails use the bare-state rates, fronts use the exact
    interface profiles, and slow passages are allocated in z through
    their reduced flows with a relative floor so that blocked passages
    still receive a finite window.  The toxicity channel is then
    rebuilt by a bounded backward sweep along the composed vegetation,
    clearing the O(delta) front-crossing mismatch that the piecewise
    reading would otherwise amplify exponentially behind the trailing
    interface.  The suggested speed is the skeleton's singular
    prediction.
    """
    if delta <= 0.0:
        raise DomainError("delta must be positive, got %g" % delta)
    builders = {
        "i_no_plateau": _seed_case_i_no_plateau,
        "i_plateau": _seed_case_i_plateau,
        "ii": _seed_case_ii,
    }
    try:
        builder = builders[skeleton.case]
    except KeyError:
        raise DomainError("unknown skeleton case %r" % (skeleton.case,)) \
            from None
    pieces, c = builder(skeleton, params, delta)

    z_parts, y_parts = [pieces[0][0]], [pieces[0][1]]
    cursor = pieces[0][0][-1]
    for z_loc, states in pieces[1:]:
        z_parts.append(cursor + z_loc[1:])
        y_parts.append(states[:, 1:])
        cursor = cursor + z_loc[-1]
    z = np.concatenate(z_parts)
    states = np.concatenate(y_parts, axis=1)
    keep = np.concatenate([[True], np.diff(z) > 1e-12])
    z, states = z[keep], states[:, keep]
    states[4] = _consistent_s(z, states[2], params, delta)
    return SeedProfile(z=z, states=states, c=float(c))


@dataclass(frozen=True)
class TravellingWaveSolution:
    """Converged pulse profile on [0, Lz] with its speed and parameters.

    ``states`` rows are (u, p, v, q, s) on the mesh ``z``; diagnostics
    record the collocation residual, the projected boundary residual,
    the full boundary deviation from the rest state, the translation
    quadrature, and solver statistics.
    """

    z: np.ndarray
    states: np.ndarray
    c: float
    params: ModelParams
    delta: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def Lz(self):
        return float(self.z[-1])

    def interpolate(self, z_new):
        """States sampled at new z values (componentwise linear)."""
        z_new = np.asarray(z_new, dtype=float)
        return np.vstack([np.interp(z_new, self.z, row)
                          for row in self.states])

    def to_csv(self):
        lines = ["z,u,p,v,q,s"]
        for j in range(self.z.size):
            lines.append(",".join("%.17g" % x for x in
                                  (self.z[j], *self.states[:, j])))
        return "\n".join(lines) + "\n"

    def summary(self):
        out = {
            "c": self.c,
            "delta": self.delta,
            "eps": self.params.eps,
            "Lz": self.Lz,
            "nodes": int(self.z.size),
            "max_v": float(self.states[2].max()),
            "max_s": float(self.states[4].max()),
            "plateau_width": plateau_width(self),
        }
        out.update(self.diagnostics)
        return out


def _required_tails(params, c, delta):
    """Decay lengths of the slowest rates on each side of the pulse."""
    lam_up = 0.5 * (-params.eps * c
                    + math.sqrt((params.eps * c) ** 2 + 4.0 * params.A))
    lam_um = 0.5 * (params.eps * c
                    + math.sqrt((params.eps * c) ** 2 + 4.0 * params.A))
    left = _TAIL_DECAY / min(lam_up, delta / params.eps)
    right = _TAIL_DECAY / lam_um
    return left, right


def _front_location(z, v):
    """z positions where v first and last crosses half its maximum."""
    vmax = v.max()
    if vmax <= 0.0:
        return z[0], z[-1]
    above = v > 0.5 * vmax
    idx = np.flatnonzero(above)
    return z[idx[0]], z[idx[-1]]


def _pad_profile(z, states, params, delta, pad_left, pad_right):
    """Extend a profile with rest-state tails on either side."""
    ru = delta / params.eps
    if pad_left > 0.0:
        n = max(24, int(pad_left))
        z_pad = np.linspace(0.0, pad_left, n + 1)[:-1]
        rest = np.tile(ORIGIN[:, None], (1, z_pad.size))
        rest[4] = states[4, 0] * np.exp(ru * (z_pad - pad_left))
        z = np.concatenate([z_pad, z + pad_left])
        states = np.concatenate([rest, states], axis=1)
    if pad_right > 0.0:
        n = max(24, int(pad_right))
        z_pad = z[-1] + np.linspace(0.0, pad_right, n + 1)[1:]
        rest = np.tile(ORIGIN[:, None], (1, z_pad.size))
        z = np.concatenate([z, z_pad])
        states = np.concatenate([states, rest], axis=1)
    return z, states


def _lncosh(x):
    """log cosh x, overflow-safe for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


class _PulseGeometry:
    """Interface positions and the stretch/mask shapes built on them.

    The interfaces are the first and last half-maximum crossings of v.
    chi is a smooth bump supported between them whose antiderivative
    realizes the coordinate stretch of the enclosed span; mask 1 and
    mask 2 are windows around one interface each for the paired phase
    conditions.  Shoulder widths are floored by the interface
    thickness so no shape is ever sharper than the structure it
    follows.
    """

    def __init__(self, z, v):
        vmax = float(v.max())
        if vmax <= 0.0:
            raise StructuralError(
                "profile has no vegetation pulse to anchor on")
        zf1, zf2 = _front_location(z, v)
        steep = float(np.abs(np.gradient(v, z)).max())
        self.interface_length = vmax / max(steep, 1e-300)
        self.interfaces = (float(zf1), float(zf2))
        self.separation = max(float(zf2 - zf1), 1e-9)
        sep = self.separation
        self._sa = zf1 + 0.25 * sep
        self._sb = zf2 - 0.25 * sep
        self._sw = max(0.08 * sep, 2.5 * self.interface_length)
        self._m1 = (zf1 - 0.2 * sep, zf1 + 0.2 * sep)
        self._m2 = (zf2 - 0.2 * sep, zf2 + 0.2 * sep)
        self._mw = max(0.05 * sep, 2.0 * self.interface_length)
        self._i0 = float(self._anti(z[0]))

    def _anti(self, s):
        w = self._sw
        return 0.5 * _CHI_MAX * w * (_lncosh((s - self._sa) / w)
                                     - _lncosh((s - self._sb) / w))

    def chi(self, s):
        """Stretch bump: 0 in the tails, _CHI_MAX between interfaces."""
        return 0.5 * _CHI_MAX * (np.tanh((s - self._sa) / self._sw)
                                 - np.tanh((s - self._sb) / self._sw))

    def chi_integral(self, s):
        """Antiderivative of chi vanishing at the left mesh end."""
        return self._anti(s) - self._i0

    def mask(self, s, which):
        """Phase window around interface 1 or 2."""
        a, b = self._m1 if which == 1 else self._m2
        return 0.5 * (np.tanh((s - a) / self._mw)
                      - np.tanh((s - b) / self._mw))


def _free_split(base, free, c_fixed, delta, pvec):
    """Resolve the free scalar into (params, speed, delta)."""
    val = float(pvec[0])
    if free == "c":
        return base, val, delta
    if free == "k":
        return replace(base, k=val), c_fixed, delta
    return base, c_fixed, val


def _rhs_jacobian(pars, c_eff, d_eff, Y, zp, size):
    """State Jacobian of the scaled travelling-frame rows."""
    A, B, H, k = pars.A, pars.B, pars.H, pars.k
    eps = pars.eps
    u, _, v, _, s = Y[:5]
    J = np.zeros((size, size, Y.shape[1]))
    J[0, 1] = zp
    J[1, 0] = zp * (v * v + A)
    J[1, 1] = zp * (-eps * c_eff)
    J[1, 2] = zp * (2.0 * u * v)
    J[2, 3] = zp / eps
    J[3, 0] = zp * (-v * v + k * v ** 3) / eps
    J[3, 2] = zp * (B - 2.0 * u * v + 3.0 * k * u * v * v + H * s) / eps
    J[3, 3] = zp * (-c_eff / eps)
    J[3, 4] = zp * (H * v / eps)
    J[4, 2] = zp * (d_eff / eps) * (-B - H * s)
    J[4, 4] = zp * (d_eff / eps) * (1.0 - H * v)
    return J


def _free_column(dfdp, free, pars, Y, zp):
    """Derivative of the scaled rows with respect to the free scalar."""
    eps = pars.eps
    _, p, v, q, s = Y[:5]
    if free == "c":
        dfdp[1, 0] = zp * (-eps * p)
        dfdp[3, 0] = zp * (-q / eps)
    elif free == "k":
        dfdp[3, 0] = zp * Y[0] * v ** 3 / eps
    else:
        dfdp[4, 0] = zp * (s - pars.B * v - pars.H * v * s) / eps


@dataclass
class _SolveRecord:
    """Outcome of one collocation pass, mapped to the physical frame."""

    success: bool
    status: int
    message: str
    niter: int
    nodes: int
    z: np.ndarray
    states: np.ndarray
    found: float
    mu: float
    rms: float
    bc_res: float
    dev: tuple
    formulation: str


def _solve_collocation(params, delta, guess, init, free="c", c_fixed=None,
                       tol=1e-8, bc_tol=None, max_nodes=60000,
                       formulation="auto"):
    """One collocation pass; reports failure in the record, not raises.

    free selects the unknown scalar: the speed c (the usual case) or
    the parameter k or delta at fixed speed c_fixed during
    continuation.  The stretch formulation adds the log-gain mu of the
    coordinate stretch as a second unknown, paired with one localized
    phase condition per interface; profiles whose interfaces are too
    close for separate windows fall back to a single global phase
    condition without the stretch.  The mesh coordinate is the initial
    profile's own axis; the returned profile is mapped back through
    the converged stretch.
    """
    if free not in _FREE_CHOICES:
        raise DomainError("free must be one of %s, got %r"
                          % ("/".join(_FREE_CHOICES), free))
    if free != "c" and (c_fixed is None or c_fixed <= 0.0):
        raise DomainError("a positive fixed speed is required when the "
                          "free scalar is %r" % free)
    z0, y0 = _as_profile(init)
    geo = _PulseGeometry(z0, y0[2])
    if formulation == "auto":
        formulation = ("stretch" if geo.separation
                       > _COMPACT_RATIO * geo.interface_length
                       else "compact")
    base = params
    eps = params.eps
    ref = CubicSpline(z0, y0, axis=1)
    ref_d = ref.derivative()

    if formulation == "stretch":

        def fun(sv, Y, pvec):
            pars, c_eff, d_eff = _free_split(base, free, c_fixed, delta,
                                             pvec)
            gain = math.exp(min(max(float(pvec[1]), -_MU_CLIP),
                                _MU_CLIP))
            zp = 1.0 + (gain - 1.0) * geo.chi(sv)
            du, dp, dv, dq, ds = tw_rhs_slow_arrays(
                Y[0], Y[1], Y[2], Y[3], Y[4], pars, c_eff, d_eff)
            corr = np.einsum("im,im->m", Y[:5] - ref(sv), ref_d(sv))
            return np.vstack([zp * du, zp * dp, zp * dv, zp * dq,
                              zp * ds, geo.mask(sv, 1) * corr,
                              geo.mask(sv, 2) * corr])

        def fun_jac(sv, Y, pvec):
            pars, c_eff, d_eff = _free_split(base, free, c_fixed, delta,
                                             pvec)
            mu = float(pvec[1])
            gain = math.exp(min(max(mu, -_MU_CLIP), _MU_CLIP))
            chi = geo.chi(sv)
            zp = 1.0 + (gain - 1.0) * chi
            J = _rhs_jacobian(pars, c_eff, d_eff, Y, zp, 7)
            rd = ref_d(sv)
            J[5, :5] = geo.mask(sv, 1) * rd
            J[6, :5] = geo.mask(sv, 2) * rd
            dfdp = np.zeros((7, 2, sv.size))
            _free_column(dfdp, free, pars, Y, zp)
            # the gain saturates at the clip, so its derivative drops to
            # an exact zero there; the resulting singular system aborts
            # the pass with a finite iterate that the next round reseeds
            if -_MU_CLIP < mu < _MU_CLIP:
                rows = tw_rhs_slow_arrays(Y[0], Y[1], Y[2], Y[3], Y[4],
                                          pars, c_eff, d_eff)
                gc = gain * chi
                for i, row in enumerate(rows):
                    dfdp[i, 1] = gc * row
            return J, dfdp

        def bc(Ya, Yb, pvec):
            _, c_eff, d_eff = _free_split(base, free, c_fixed, delta,
                                          pvec)
            lin = linearize_at_origin(base, max(c_eff, _C_FLOOR),
                                      delta=max(d_eff, _D_FLOOR))
            ga = lin.stable_left @ (Ya[:5] - ORIGIN)
            gb = lin.unstable_left @ (Yb[:5] - ORIGIN)
            return np.concatenate([ga, gb,
                                   [Ya[5], Yb[5], Ya[6], Yb[6]]])

        y_init = np.vstack([y0, np.zeros((2, z0.size))])
        p0 = [float(guess), 0.0]
    else:

        def fun(zv, Y, pvec):
            pars, c_eff, d_eff = _free_split(base, free, c_fixed, delta,
                                             pvec)
            du, dp, dv, dq, ds = tw_rhs_slow_arrays(
                Y[0], Y[1], Y[2], Y[3], Y[4], pars, c_eff, d_eff)
            corr = np.einsum("im,im->m", Y[:5] - ref(zv), ref_d(zv))
            return np.vstack([du, dp, dv, dq, ds, corr])

        def fun_jac(zv, Y, pvec):
            pars, c_eff, d_eff = _free_split(base, free, c_fixed, delta,
                                             pvec)
            J = _rhs_jacobian(pars, c_eff, d_eff, Y, 1.0, 6)
            J[5, :5] = ref_d(zv)
            dfdp = np.zeros((6, 1, zv.size))
            _free_column(dfdp, free, pars, Y, 1.0)
            return J, dfdp

        def bc(Ya, Yb, pvec):
            _, c_eff, d_eff = _free_split(base, free, c_fixed, delta,
                                          pvec)
            lin = linearize_at_origin(base, max(c_eff, _C_FLOOR),
                                      delta=max(d_eff, _D_FLOOR))
            ga = lin.stable_left @ (Ya[:5] - ORIGIN)
            gb = lin.unstable_left @ (Yb[:5] - ORIGIN)
            return np.concatenate([ga, gb, [Ya[5], Yb[5]]])

        y_init = np.vstack([y0, np.zeros((1, z0.size))])
        p0 = [float(guess)]

    try:
        res = solve_bvp(fun, bc, z0, y_init, p=p0, fun_jac=fun_jac,
                        tol=tol, bc_tol=bc_tol, max_nodes=max_nodes)
    except (ValueError, np.linalg.LinAlgError, DomainError) as exc:
        return _SolveRecord(
            success=False, status=-1, message=str(exc), niter=0,
            nodes=z0.size, z=z0, states=y0, found=float(guess), mu=0.0,
            rms=math.inf, bc_res=math.inf, dev=(math.inf, math.inf),
            formulation=formulation)

    if formulation == "stretch":
        mu = float(res.p[1])
        gain = math.exp(min(max(mu, -_MU_CLIP), _MU_CLIP))
        z_out = res.x + (gain - 1.0) * geo.chi_integral(res.x)
    else:
        mu = 0.0
        z_out = res.x
    states = res.y[:5]
    dev_l = float(np.abs(states[:, 0] - ORIGIN).max())
    dev_r = float(np.abs(states[:, -1] - ORIGIN).max())
    bc_res = float(np.abs(bc(res.y[:, 0], res.y[:, -1], res.p)).max())
    return _SolveRecord(
        success=bool(res.success), status=int(res.status),
        message=str(res.message), niter=int(res.niter),
        nodes=int(res.x.size), z=z_out, states=states,
        found=float(res.p[0]), mu=mu,
        rms=float(np.max(res.rms_residuals)), bc_res=bc_res,
        dev=(dev_l, dev_r), formulation=formulation)


def _converge_profile(params, delta, guess, init, free="c", c_fixed=None,
                      tol=1e-8, bc_tol=1e-10, max_nodes=60000,
                      max_rounds=_MAX_ROUNDS):
    """Reseeding rounds at relaxed tolerance, then one solve at tol.

    Each round rebuilds the stretch geometry from the current profile
    and reseeds from the physical-frame iterate, which walks the
    interface separation toward the true one even when the pass itself
    stalls; a pass that converged with a mild stretch settles the
    rounds.  The final pass must converge or this raises.
    """
    z0, y0 = _as_profile(init)
    x0, d0 = float(guess), float(delta)
    round_tol = max(tol, _ROUND_TOL)
    rounds = 0
    final = None
    for _ in range(max_rounds):
        rec = _solve_collocation(
            params, d0, x0, (z0, y0), free=free, c_fixed=c_fixed,
            tol=round_tol, bc_tol=bc_tol,
            max_nodes=min(max_nodes, _ROUND_NODES))
        rounds += 1
        settled = rec.success and abs(rec.mu) <= _MU_SETTLED
        if settled and round_tol <= tol:
            final = rec
            break
        usable = (rec.found > 0.0 and np.all(np.isfinite(rec.states))
                  and np.all(np.diff(rec.z) > 0.0))
        if not usable:
            break
        z0, y0, x0 = rec.z, rec.states, rec.found
        if free == "delta":
            d0 = rec.found
        if settled:
            break
    if final is None:
        final = _solve_collocation(params, d0, x0, (z0, y0), free=free,
                                   c_fixed=c_fixed, tol=tol,
                                   bc_tol=bc_tol, max_nodes=max_nodes)
    if not final.success:
        raise ConvergenceError(
            "collocation failed (status %d: %s) with free=%s after %d "
            "rounds: %d nodes, %d iterations, max rms residual %.3g"
            % (final.status, final.message, free, rounds, final.nodes,
               final.niter, final.rms))
    if final.found <= 0.0:
        raise ConvergenceError("collocation converged to a nonpositive "
                               "%s = %g" % (free, final.found))

    pars_out, c_out, delta_out = _free_split(
        params, free, c_fixed, d0, [final.found])
    dev_l, dev_r = final.dev
    diagnostics = {
        "free": free,
        "formulation": final.formulation,
        "rounds": rounds,
        "niter": final.niter,
        "nodes": final.nodes,
        "rms_residual": final.rms,
        "bc_residual": final.bc_res,
        "boundary_deviation": (dev_l, dev_r),
        "mu": final.mu,
    }
    sol = TravellingWaveSolution(
        z=final.z, states=final.states, c=float(c_out), params=pars_out,
        delta=float(delta_out), diagnostics=diagnostics)
    if max(dev_l, dev_r) > 1e-6:
        raise IntervalTooShortError(
            "pulse tails have not decayed (deviation %.3g left, %.3g "
            "right, interval length %g); enlarge the interval"
            % (dev_l, dev_r, float(final.z[-1])))
    return sol, final.found


def solve_profile(params: ModelParams, delta, c_guess,
                  init_profile, *, tol=1e-8, bc_tol=1e-10,
                  max_nodes=60000,
                  max_rounds=_MAX_ROUNDS) -> TravellingWaveSolution:
    """Solve for a pulse profile and its speed from an initial guess.

    The speed and the stretch gain are the free scalars; projection
    boundary conditions are rebuilt from the current speed in every
    iteration and the paired phase conditions are taken against the
    initial profile, so the converged pulse keeps its translation.
    Cold starts far from the solution are carried by reseeding rounds
    at a relaxed tolerance before the final solve at tol.  Raises a
    convergence error with solver diagnostics if the final collocation
    fails and an interval-too-short error if the converged profile has
    not decayed to the rest state at either boundary.
    """
    if c_guess <= 0.0:
        raise DomainError("the speed guess must be positive, got %g"
                          % c_guess)
    if delta <= 0.0:
        raise DomainError("delta must be positive, got %g" % delta)
    sol, _ = _converge_profile(params, delta, c_guess, init_profile,
                               free="c", tol=tol, bc_tol=bc_tol,
                               max_nodes=max_nodes, max_rounds=max_rounds)
    return sol


def refine_at_delta(sol: TravellingWaveSolution, delta,
                    **kwargs) -> TravellingWaveSolution:
    """Re-solve an existing pulse at a new delta, widening tails first.

    The previous profile seeds the solve; when the new toxicity rate
    needs a longer approach on either side, the profile is padded with
    rest-state tails (the toxicity tail keeps its exponential form).
    """
    if delta <= 0.0:
        raise DomainError("delta must be positive, got %g" % delta)
    z, states = sol.z, sol.states.copy()
    need_l, need_r = _required_tails(sol.params, sol.c, delta)
    have_l, have_r_edge = _front_location(z, states[2])
    have_r = z[-1] - have_r_edge
    pad_l = max(0.0, need_l * _TAIL_MARGIN - have_l)
    pad_r = max(0.0, need_r * _TAIL_MARGIN - have_r)
    z, states = _pad_profile(z, states, sol.params, delta, pad_l, pad_r)
    return solve_profile(sol.params, delta, sol.c, (z, states), **kwargs)


def plateau_width(sol):
    """Mesh-weighted length of the longest flat stretch of high v.

    A mesh interval counts when both endpoints have v above half its
    maximum and |dv/dz| below 1e-2 of its maximum; the result is 0 when
    no interval qualifies.  This is a diagnostic measure: fast pulses
    score near zero, plateau pulses score the superslow passage length.
    """
    z, states = _as_profile(sol)
    v = states[2]
    vmax = float(v.max())
    if vmax <= 0.0:
        return 0.0
    dv = np.gradient(v, z)
    flat = (v > 0.5 * vmax) & (np.abs(dv) < 1e-2 * np.abs(dv).max())
    good = flat[:-1] & flat[1:]
    if not np.any(good):
        return 0.0
    dz = np.diff(z)
    best = run = 0.0
    for ok, w in zip(good, dz):
        run = run + w if ok else 0.0
        best = max(best, run)
    return float(best)


@dataclass(frozen=True)
class ContinuationSpec:
    """Controls for one pseudo-arclength branch run.

    range bounds the active parameter; steps adapt between step floors
    and caps, and the run switches to stepping the speed with the
    parameter free (parameter exchange) when parameter steps stall near
    a fold.  delta is stepped on a log scale.  A point is accepted when
    the collocation converges within accept_iter mesh iterations and
    without extra reseeding rounds; tol is the collocation tolerance
    for every step.
    """

    active_param: str
    range: tuple
    max_steps: int = 120
    step0: Optional[float] = None
    min_step: Optional[float] = None
    max_step: Optional[float] = None
    accept_iter: int = 5
    c_step_floor: float = 1e-6
    s_floor: float = 1e-3
    keep_solutions: bool = True
    tol: float = 1e-6


@dataclass(frozen=True)
class BranchPoint:
    """One accepted continuation point and its scalar measures."""

    param: float
    c: float
    plateau_width: float
    max_v: float
    max_s: float
    solution: Optional[TravellingWaveSolution]


@dataclass(frozen=True)
class ContinuationBranch:
    """Accepted points, detected folds, and the termination reason."""

    active_param: str
    points: tuple
    fold_indices: tuple
    terminated: str

    def to_csv(self):
        lines = ["param,c,plateau_width,max_v,max_s"]
        for pt in self.points:
            lines.append(",".join("%.17g" % x for x in
                                  (pt.param, pt.c, pt.plateau_width,
                                   pt.max_v, pt.max_s)))
        return "\n".join(lines) + "\n"

    def to_json(self, indent=2):
        return json.dumps({
            "active_param": self.active_param,
            "n_points": len(self.points),
            "fold_indices": list(self.fold_indices),
            "terminated": self.terminated,
        }, indent=indent)


_STEP_DEFAULTS = {
    # step0, min_step, max_step in the stepping coordinate
    "k": (0.01, 1e-5, 0.04),
    "delta": (0.1, 1e-4, 0.25),
}


def _fold_indices(param_values):
    d = np.diff(param_values)
    keep = np.flatnonzero(d != 0.0)
    folds = []
    for a, b in zip(keep[:-1], keep[1:]):
        if d[a] * d[b] < 0.0:
            folds.append(int(b))
    return tuple(folds)


def _measure(sol, active_param, keep):
    param = sol.params.k if active_param == "k" else sol.delta
    return BranchPoint(
        param=float(param), c=float(sol.c),
        plateau_width=plateau_width(sol),
        max_v=float(sol.states[2].max()),
        max_s=float(sol.states[4].max()),
        solution=sol if keep else None)


def continue_branch(start: TravellingWaveSolution,
                    spec: ContinuationSpec) -> ContinuationBranch:
    """Trace a solution branch in k or delta through folds.

    Steps the active parameter with the speed free; when steps stall at
    the floor the roles are exchanged (speed stepped, parameter free),
    which carries the branch around folds, and the run switches back
    once the parameter moves again.  Terminates on the range boundary,
    the step floor, the step budget, or the collapse of the toxicity
    amplitude, and reports which.
    """
    active = spec.active_param
    if active not in ("k", "delta"):
        raise DomainError("active_param must be 'k' or 'delta', got %r"
                          % (active,))
    lo, hi = (float(spec.range[0]), float(spec.range[1]))
    if not lo < hi:
        raise DomainError("range must satisfy lo < hi, got (%g, %g)"
                          % (lo, hi))
    log_scale = active == "delta"

    def to_x(value):
        return math.log10(value) if log_scale else value

    def from_x(x):
        return 10.0 ** x if log_scale else x

    step0, min_step, max_step = _STEP_DEFAULTS[active]
    step0 = spec.step0 if spec.step0 is not None else step0
    min_step = spec.min_step if spec.min_step is not None else min_step
    max_step = spec.max_step if spec.max_step is not None else max_step

    points = [_measure(start, active, True)]
    solutions = [start]
    x_lo, x_hi = to_x(lo), to_x(hi)
    x0 = to_x(points[0].param)
    if not x_lo <= x0 <= x_hi:
        raise DomainError("start parameter %g lies outside the range "
                          "(%g, %g)" % (points[0].param, lo, hi))

    direction = 1.0 if (x_hi - x0) >= (x0 - x_lo) else -1.0
    h = direction * step0
    dc = 0.0
    mode = "param"
    terminated = "max_steps"

    def _solve_at(x_target, c_guess):
        value = from_x(x_target)
        prev = solutions[-1]
        if active == "k":
            pars = replace(prev.params, k=value)
            delta = prev.delta
        else:
            pars = prev.params
            delta = value
        z, states = prev.z, prev.states
        need_l, _ = _required_tails(pars, c_guess, delta)
        have_l, _ = _front_location(z, states[2])
        pad = max(0.0, need_l * _TAIL_MARGIN - have_l)
        if pad > 0.0:
            z, states = _pad_profile(z, states.copy(), pars, delta,
                                     pad, 0.0)
        sol, _ = _converge_profile(pars, delta, c_guess, (z, states),
                                   free="c", tol=spec.tol)
        return sol

    def _solve_exchanged(c_target, x_guess):
        prev = solutions[-1]
        sol, _ = _converge_profile(
            prev.params, prev.delta, from_x(x_guess), prev,
            free=active, c_fixed=c_target, tol=spec.tol)
        return sol

    while len(points) < spec.max_steps:
        x_prev = to_x(points[-1].param)
        c_prev = points[-1].c
        if mode == "param":
            x_t = min(max(x_prev + h, x_lo), x_hi)
            if abs(x_t - x_prev) < 1e-12 * max(1.0, abs(x_t)):
                terminated = "range"
                break
            if len(points) >= 2:
                x_pp = to_x(points[-2].param)
                slope = ((c_prev - points[-2].c) / (x_prev - x_pp)
                         if x_prev != x_pp else 0.0)
            else:
                slope = 0.0
            c_guess = c_prev + slope * (x_t - x_prev)
            try:
                sol = _solve_at(x_t, max(c_guess, 1e-8))
                ok = (sol.diagnostics["niter"] <= spec.accept_iter
                      and sol.diagnostics["rounds"] <= 2)
            except (ConvergenceError, DomainError, ValueError):
                ok = False
            if not ok:
                h *= 0.5
                if abs(h) < min_step:
                    mode = "c"
                    if len(points) >= 2:
                        dc = points[-1].c - points[-2].c
                        dc = math.copysign(
                            max(abs(dc) * 0.5, 4.0 * spec.c_step_floor),
                            dc if dc != 0.0 else 1.0)
                    else:
                        dc = -16.0 * spec.c_step_floor
                continue
        else:
            c_t = c_prev + dc
            if c_t <= 0.0:
                terminated = "step_floor"
                break
            try:
                sol = _solve_exchanged(c_t, x_prev)
                ok = (sol.diagnostics["niter"] <= spec.accept_iter
                      and sol.diagnostics["rounds"] <= 2)
            except (ConvergenceError, DomainError, ValueError):
                ok = False
            if not ok:
                dc *= 0.5
                if abs(dc) < spec.c_step_floor:
                    terminated = "step_floor"
                    break
                continue

        points.append(_measure(sol, active, spec.keep_solutions))
        solutions = [sol]
        x_new = to_x(points[-1].param)
        edge_tol = 1e-9 * max(1.0, abs(x_hi), abs(x_lo))
        if mode == "param":
            if x_new >= x_hi - edge_tol or x_new <= x_lo + edge_tol:
                terminated = "range"
                break
            if sol.diagnostics["niter"] <= 2:
                h = math.copysign(min(abs(h) * 1.4, max_step), h)
        else:
            dx = x_new - x_prev
            if abs(dx) >= 2.0 * min_step:
                mode = "param"
                h = math.copysign(min(max(abs(dx) * 1.5, 2.0 * min_step),
                                      max_step), dx)
            elif sol.diagnostics["niter"] <= 2:
                dc = math.copysign(min(abs(dc) * 1.4, 0.1 * c_prev), dc)
        if points[-1].max_s < spec.s_floor:
            terminated = "trivial_s"
            break
        if not x_lo <= x_new <= x_hi:
            terminated = "range"
            break

    return ContinuationBranch(
        active_param=active, points=tuple(points),
        fold_indices=_fold_indices([pt.param for pt in points]),
        terminated=terminated)
