"""Assembly of singular pulse skeletons from their closed-form pieces.

A skeleton is the zero-dissipation limit of a travelling pulse: an ordered
concatenation of fast front profiles, slow manifold sections and superslow
arcs that together close up into a loop through the bare state
(1, 0, 0, 0, 0). Segments are sampled as polylines; consecutive segments
share endpoints up to the exponential tails of the truncated fronts.

Sections along the slow manifolds are sampled geometrically rather than by
integrating the reduced flow in time. The geometric object exists whenever
the jump heights and speeds match, even at parameters where the reduced
flow direction would forbid traversing it; pass require_monotone_flow=True
to reject those parameters instead.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .casei import (
    noplateau_flow_blocked,
    plateau_arc,
    s2_of_u,
    solve_plateau_case_i,
    solve_sstar_noplateau,
)
from .caseii import (
    case_ii_n1_curve,
    case_ii_u1_plus,
    case_ii_u_star,
    case_ii_V_plus,
    solve_matching_case_ii,
)
from .errors import BlockedFlowError, DomainError
from .layer import heteroclinic, jump_speed, v_pm
from .model import ModelParams

SKELETON_CASES = ("i_no_plateau", "i_plateau", "ii")
TIMESCALES = ("fast", "slow", "superslow")

# half-width of fast windows in units of 1/kappa; tanh tails are then
# O(e^-24) ~ 4e-11, comfortably inside the 1e-8 junction tolerance
_FAST_HALF_WIDTH = 12.0
_N_FAST = 201
_N_SLOW = 61
_N_LINE = 41


@dataclass(frozen=True)
class Segment:
    """One sampled piece of a skeleton: an (N, 5) polyline of (u,p,v,q,s)."""

    label: str
    timescale: str
    points: np.ndarray


@dataclass(frozen=True)
class SingularSkeleton:
    """Ordered segments plus the scalars that positioned them.

    Scalars that do not apply to the case are None (s0 outside case ii,
    u_star outside the plateau case).
    """

    case: str
    segments: tuple
    s_star: Optional[float]
    u_star: Optional[float]
    s0: Optional[float]
    c_pred: float

    def junction_gaps(self):
        """Max abs mismatch over all 5 components at each interior junction."""
        gaps = []
        for left, right in zip(self.segments[:-1], self.segments[1:]):
            gaps.append(float(np.max(np.abs(left.points[-1]
                                            - right.points[0]))))
        return gaps

    def endpoint_error(self):
        """Distance of the first and last sample from the bare state."""
        bare = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        first = np.max(np.abs(self.segments[0].points[0] - bare))
        last = np.max(np.abs(self.segments[-1].points[-1] - bare))
        return float(max(first, last))

    def to_dict(self):
        return {
            "case": self.case,
            "s_star": self.s_star,
            "u_star": self.u_star,
            "s0": self.s0,
            "c_pred": self.c_pred,
            "segments": [
                {"label": seg.label, "timescale": seg.timescale,
                 "points": seg.points.tolist()}
                for seg in self.segments
            ],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["segment", "timescale", "u", "p", "v", "q", "s"])
        for seg in self.segments:
            for row in seg.points:
                writer.writerow([seg.label, seg.timescale]
                                + ["%.17g" % x for x in row])
        return buf.getvalue()


def _segment(label, timescale, columns):
    pts = np.column_stack(columns)
    pts.setflags(write=False)
    return Segment(label=label, timescale=timescale, points=pts)


def _fast_segment(label, u0, p0, s0, direction, params):
    jump, profile = heteroclinic(u0, s0, direction, params)
    kappa = math.sqrt(params.k * u0) * jump.v_plus / (2.0 * math.sqrt(2.0))
    zeta = np.linspace(-_FAST_HALF_WIDTH / kappa, _FAST_HALF_WIDTH / kappa,
                       _N_FAST)
    v, q = profile(zeta)
    n = zeta.size
    return _segment(label, "fast",
                    [np.full(n, u0), np.full(n, p0), v, q, np.full(n, s0)])


def _ell0_line(label, u_from, u_to, branch, params):
    """Sections of the bare-soil saddle manifolds p = ±sqrt(A)(u-1)."""
    u = np.linspace(u_from, u_to, _N_LINE)
    sign = 1.0 if branch == "unstable" else -1.0
    p = sign * math.sqrt(params.A) * (u - 1.0)
    z = np.zeros(u.size)
    return _segment(label, "superslow", [u, p, z, z, z])


def _upper_branch_values(u0, s, params):
    return np.array([v_pm(u0, si, params)[1] for si in s])


def _skeleton_case_i_no_plateau(params, require_monotone_flow):
    s_star = solve_sstar_noplateau(params)
    if require_monotone_flow and noplateau_flow_blocked(params, s_star):
        s_eq = s2_of_u(1.0, params)
        raise BlockedFlowError(
            "vegetated-branch descent from s*=%.6g is blocked by the "
            "equilibrium at s=%.6g" % (s_star, s_eq),
            failed=["s2(1) > s_star"])
    c_pred = jump_speed(1.0, 0.0, "diamond", params)

    s_up = np.linspace(0.0, s_star, _N_SLOW)
    n = s_up.size
    ones, zeros = np.full(n, 1.0), np.zeros(n)
    seg_e0 = _segment("E0[0,s*]", "slow", [ones, zeros, zeros, zeros, s_up])

    seg_dag = _fast_segment("phi_dagger", 1.0, 0.0, s_star, "dagger", params)

    s_down = np.linspace(s_star, 0.0, _N_SLOW)
    v_up = _upper_branch_values(1.0, s_down, params)
    seg_e1 = _segment("E1+[0,s*]", "slow",
                      [ones, zeros, v_up, zeros, s_down])

    seg_dia = _fast_segment("phi_diamond", 1.0, 0.0, 0.0, "diamond", params)

    return SingularSkeleton(
        case="i_no_plateau",
        segments=(seg_e0, seg_dag, seg_e1, seg_dia),
        s_star=float(s_star), u_star=None, s0=None, c_pred=float(c_pred))


def _skeleton_case_i_plateau(params, require_monotone_flow):
    # the descent on the vegetated branch starts exactly at the branch
    # equilibrium s2(u*) and the flow below it points strictly downward,
    # so the monotone-flow requirement holds by construction here
    _, u_star, s_star, c_pred = solve_plateau_case_i(params)
    p_star = math.sqrt(params.A) * (u_star - 1.0)

    seg_in = _ell0_line("ell0+", 1.0, u_star, "unstable", params)

    s_up = np.linspace(0.0, s_star, _N_SLOW)
    n = s_up.size
    u_col, p_col = np.full(n, u_star), np.full(n, p_star)
    zeros = np.zeros(n)
    seg_e0 = _segment("E0[0,s*]", "slow", [u_col, p_col, zeros, zeros, s_up])

    seg_dag = _fast_segment("phi_dagger", u_star, p_star, s_star, "dagger",
                            params)

    rows, _ = plateau_arc(u_star, params)
    arc = Segment(label="ell2(u*)", timescale="superslow", points=rows)

    s_down = np.linspace(s_star, 0.0, _N_SLOW)
    v_up = _upper_branch_values(u_star, s_down, params)
    seg_e1 = _segment("E1+[0,s*]", "slow",
                      [u_col, np.full(n, -p_star), v_up, zeros, s_down])

    seg_dia = _fast_segment("phi_diamond", u_star, -p_star, 0.0, "diamond",
                            params)

    seg_out = _ell0_line("ell0-", u_star, 1.0, "stable", params)

    return SingularSkeleton(
        case="i_plateau",
        segments=(seg_in, seg_e0, seg_dag, arc, seg_e1, seg_dia, seg_out),
        s_star=float(s_star), u_star=float(u_star), s0=None,
        c_pred=float(c_pred))


def _ell1_section(label, u_from, u_to, s0, u1, sign, params):
    """Slow sections on the vegetated manifold, p from the potential."""
    u = np.linspace(u_from, u_to, _N_SLOW)
    v_ref = 2.0 * case_ii_V_plus(u1, s0, params)
    p = np.empty(u.size)
    v = np.empty(u.size)
    for i, ui in enumerate(u):
        gap = v_ref - 2.0 * case_ii_V_plus(float(ui), s0, params)
        p[i] = sign * math.sqrt(max(gap, 0.0))
        v[i] = v_pm(float(ui), s0, params)[1]
    n = u.size
    return _segment(label, "slow", [u, p, v, np.zeros(n), np.full(n, s0)])


def _skeleton_case_ii(params, require_monotone_flow):
    # solve_matching_case_ii already enforces the monotone drift condition
    # along the vegetated superslow curve, so the flag adds nothing here
    s0, c = solve_matching_case_ii(params)
    u1_at_s0 = case_ii_u1_plus(s0, params)
    u1_at_0 = case_ii_u1_plus(0.0, params)
    ustar_s0 = case_ii_u_star(s0, params)
    ustar_0 = case_ii_u_star(0.0, params)
    sqrt_a = math.sqrt(params.A)

    s_up = np.linspace(0.0, s0, _N_SLOW)
    n = s_up.size
    seg_n0 = _segment("N0[0,s0]", "superslow",
                      [np.full(n, 1.0), np.zeros(n), np.zeros(n),
                       np.zeros(n), s_up])

    u_in = np.linspace(1.0, ustar_s0, _N_LINE)
    m = u_in.size
    seg_l0u = _segment("ell0u", "slow",
                       [u_in, sqrt_a * (u_in - 1.0), np.zeros(m),
                        np.zeros(m), np.full(m, s0)])

    seg_dag = _fast_segment("phi_dagger", ustar_s0,
                            sqrt_a * (ustar_s0 - 1.0), s0, "dagger", params)

    seg_l1s = _ell1_section("ell1s", ustar_s0, u1_at_s0, s0, u1_at_s0, -1.0,
                            params)

    v_land = v_pm(u1_at_s0, s0, params)[1]
    v_end = case_ii_n1_curve(v_land, params)[5]
    v_grid = np.linspace(v_land, v_end, _N_SLOW)
    n1_u = np.empty(v_grid.size)
    n1_s = np.empty(v_grid.size)
    for i, vi in enumerate(v_grid):
        n1_u[i], n1_s[i] = case_ii_n1_curve(float(vi), params)[:2]
    seg_n1 = _segment("N1[0,s0]", "superslow",
                      [n1_u, np.zeros(v_grid.size), v_grid,
                       np.zeros(v_grid.size), n1_s])

    seg_l1u = _ell1_section("ell1u", u1_at_0, ustar_0, 0.0, u1_at_0, 1.0,
                            params)

    seg_dia = _fast_segment("phi_diamond", ustar_0,
                            sqrt_a * (1.0 - ustar_0), 0.0, "diamond", params)

    u_out = np.linspace(ustar_0, 1.0, _N_LINE)
    m = u_out.size
    seg_l0s = _segment("ell0s", "slow",
                       [u_out, sqrt_a * (1.0 - u_out), np.zeros(m),
                        np.zeros(m), np.zeros(m)])

    return SingularSkeleton(
        case="ii",
        segments=(seg_n0, seg_l0u, seg_dag, seg_l1s, seg_n1, seg_l1u,
                  seg_dia, seg_l0s),
        s_star=None, u_star=None, s0=float(s0), c_pred=float(c))


def build_skeleton(params: ModelParams, case,
                   require_monotone_flow=False) -> SingularSkeleton:
    """Construct the singular skeleton for one of the three pulse cases.

    Construction failures (window or matching hypotheses) propagate as
    condition-violated errors; with require_monotone_flow=True a skeleton
    whose slow passage is blocked by an equilibrium raises a blocked-flow
    error instead of being returned.
    """
    if case == "i_no_plateau":
        return _skeleton_case_i_no_plateau(params, require_monotone_flow)
    if case == "i_plateau":
        return _skeleton_case_i_plateau(params, require_monotone_flow)
    if case == "ii":
        return _skeleton_case_ii(params, require_monotone_flow)
    raise DomainError("unknown skeleton case %r; expected one of %s"
                      % (case, ", ".join(SKELETON_CASES)))


def manifold_residuals(skeleton: SingularSkeleton, params: ModelParams):
    """Per-segment max residual of the algebra defining each manifold.

    Fast segments are excluded (they are transitions, not manifold
    sections). Slow vegetated sections are checked against the layer
    equilibrium relation, bare sections against v = q = 0, line sections
    against their saddle-manifold equations, and superslow arcs against
    both the branch relation and the s-balance.
    """
    k, H, B, A = params.k, params.H, params.B, params.A
    out = {}
    for seg in skeleton.segments:
        u, p, v, q, s = seg.points.T
        if seg.timescale == "fast":
            continue
        checks = [np.abs(q)]
        vegetated = np.max(v) > 0.0
        if vegetated:
            # layer equilibrium: B + Hs = u v (1 - k v), scaled like q'
            checks.append(np.abs(B * v + H * v * s - u * v * v
                                 * (1.0 - k * v)))
        else:
            checks.append(np.abs(v))
        if seg.label.startswith("ell0"):
            sign = 1.0 if seg.label in ("ell0+", "ell0u") else -1.0
            checks.append(np.abs(p - sign * math.sqrt(A) * (u - 1.0)))
        if seg.label.startswith("N"):
            checks.append(np.abs(p))
        if seg.label.startswith("N0"):
            checks.append(np.abs(u - 1.0))
        if seg.label.startswith("N1"):
            # the water balance pins u along the vegetated superslow curve
            checks.append(np.abs(u * v * v - A * (1.0 - u)))
        if seg.label.startswith("ell2"):
            # the plateau arc sits on the s-balance nullcline s = Bv + Hvs
            checks.append(np.abs(s - B * v - H * v * s))
        out[seg.label] = float(max(np.max(c) for c in checks))
    return out
