"""Existence verdicts for the three pulse constructions.

Each theorem-style checker evaluates its full hypothesis list and
records, per inequality, whether it failed; failures are data, never
exceptions. The first two constructions live in the fast-toxicity
regime and exclude one another: the no-plateau pulse needs the
downward toxicity passage at u = 1 to be free of equilibria, while the
plateau pulse exists precisely when that passage is blocked and the
orbit detours through an interior water level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .casei import (
    s2_of_u,
    solve_plateau_case_i,
    solve_sstar_noplateau,
    upper_branch_s_flow,
)
from .caseii import case_ii_u1_plus, solve_matching_case_ii
from .errors import (
    ConditionViolated,
    ConvergenceError,
    DomainError,
    NoConnectionError,
)
from .layer import jump_speed
from .model import ModelParams, RegimeLabel, classify_regime, derive_tw_params

_THEOREMS = ("thm1", "thm2", "thm3")


@dataclass(frozen=True)
class NoPlateauVerdict:
    holds: bool
    s_star: Optional[float]
    s2_of_1: Optional[float]
    violated: tuple


@dataclass(frozen=True)
class PlateauVerdict:
    holds: bool
    U_star: Optional[float]
    u_star: Optional[float]
    s_star: Optional[float]
    violated: tuple


@dataclass(frozen=True)
class SlowToxicityVerdict:
    holds: bool
    s0: Optional[float]
    c: Optional[float]
    u1_plus: Optional[float]
    violated: tuple


@dataclass(frozen=True)
class ExistenceReport:
    """Bundled verdicts; fields are None for checks that were not requested."""

    thm1: Optional[NoPlateauVerdict]
    thm2: Optional[PlateauVerdict]
    thm3: Optional[SlowToxicityVerdict]
    regime: Optional[RegimeLabel]

    def to_dict(self):
        def verdict(v):
            if v is None:
                return None
            d = dict(v.__dict__)
            d["violated"] = list(d["violated"])
            return d

        out = {name: verdict(getattr(self, name)) for name in _THEOREMS}
        out["regime"] = (None if self.regime is None
                         else {"tag": self.regime.tag,
                               "ratio": self.regime.ratio})
        return out

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def _check_noplateau(params: ModelParams) -> NoPlateauVerdict:
    k, B, H = params.k, params.B, params.H
    w = 4.0 * k * B
    violated = []
    if w <= 5.0 / 9.0:
        violated.append("4kB > 5/9")
    if w >= 8.0 / 9.0:
        violated.append("4kB < 8/9")
    window_ok = not violated

    s_star = None
    if 0.0 < w < 1.0:
        s_star = (-1.0 + 3.0 * math.sqrt(1.0 - w)) / (9.0 * H * k)

    s2_1 = None
    try:
        s2_1 = s2_of_u(1.0, params)
    except (ConditionViolated, ConvergenceError):
        pass

    # the passage at u = 1 is free when no branch equilibrium exists
    # (either alternative below) or when it sits above the travelled range
    alt_failed = []
    free = False
    if H >= 2.0 * k:
        free = True
    else:
        alt_failed.append("H >= 2k")
        if (1.0 - w) / w < H / (2.0 * k - H):
            free = True
        else:
            alt_failed.append("(1-4kB)/(4kB) < H/(2k-H)")
            if s2_1 is not None and s_star is not None and s2_1 > s_star:
                free = True
            else:
                alt_failed.append("s2(1) > s_star")

    holds = window_ok and free
    if window_ok and not free:
        violated.extend(alt_failed)
    return NoPlateauVerdict(holds=holds, s_star=s_star, s2_of_1=s2_1,
                            violated=tuple(violated))


def _check_plateau(params: ModelParams) -> PlateauVerdict:
    try:
        U_star, u_star, s_star, _ = solve_plateau_case_i(params)
    except ConditionViolated as exc:
        return PlateauVerdict(holds=False, U_star=None, u_star=None,
                              s_star=None, violated=tuple(exc.failed))
    except (ConvergenceError, NoConnectionError, ValueError) as exc:
        return PlateauVerdict(holds=False, U_star=None, u_star=None,
                              s_star=None, violated=(str(exc),))
    return PlateauVerdict(holds=True, U_star=U_star, u_star=u_star,
                          s_star=s_star, violated=())


def _check_slow_toxicity(params: ModelParams) -> SlowToxicityVerdict:
    try:
        s0, c = solve_matching_case_ii(params)
        u1 = case_ii_u1_plus(s0, params)
    except ConditionViolated as exc:
        return SlowToxicityVerdict(holds=False, s0=None, c=None,
                                   u1_plus=None, violated=tuple(exc.failed))
    except (ConvergenceError, DomainError, ValueError) as exc:
        return SlowToxicityVerdict(holds=False, s0=None, c=None,
                                   u1_plus=None, violated=(str(exc),))
    return SlowToxicityVerdict(holds=True, s0=s0, c=c, u1_plus=u1,
                               violated=())


def existence_report(params: ModelParams, include=_THEOREMS,
                     c=None) -> ExistenceReport:
    """Evaluate the requested existence checks and label the regime.

    include restricts the work (useful in bulk sweeps); the regime label
    uses the explicit speed c when given, otherwise the predicted speed
    of the first construction that holds, and stays None when no speed
    is available.
    """
    unknown = sorted(set(include) - set(_THEOREMS))
    if unknown:
        raise DomainError("unknown checks requested: %s" % ", ".join(unknown))

    thm1 = _check_noplateau(params) if "thm1" in include else None
    thm2 = _check_plateau(params) if "thm2" in include else None
    thm3 = _check_slow_toxicity(params) if "thm3" in include else None

    if thm1 is not None and thm2 is not None:
        if thm1.holds and thm2.holds:
            raise ConvergenceError(
                "internal inconsistency: both fast-toxicity constructions "
                "report existence at the same parameters")

    speed = None
    if c is not None:
        speed = float(c)
    elif thm1 is not None and thm1.holds:
        speed = jump_speed(1.0, 0.0, "diamond", params)
    elif thm2 is not None and thm2.holds:
        speed = solve_plateau_case_i(params)[3]
    elif thm3 is not None and thm3.holds:
        speed = thm3.c

    regime = None
    if speed is not None and speed > 0.0:
        regime = classify_regime(params.eps,
                                 derive_tw_params(params, speed).delta)
    return ExistenceReport(thm1=thm1, thm2=thm2, thm3=thm3, regime=regime)
