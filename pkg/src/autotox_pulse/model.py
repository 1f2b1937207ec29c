"""Parameters, scalings, and right-hand sides of the model.

The PDE system on a one-dimensional periodic domain is

    U_t = U_xx + A*(1 - U) - U*V^2
    V_t = eps^2 * V_xx + U*V^2*(1 - k*V) - B*V - H*V*S
    S_t = (-S + B*V + H*V*S) / D

with water U, biomass V and toxicity S. Travelling waves U(x - eps*c*t)
satisfy a five-dimensional ODE in (u, p, v, q, s), written either on the
slow scale z or on the fast scale zeta = z/eps; the two right-hand sides
differ by an exact factor eps. The derived ratio delta = 1/(c*D) measures
the toxicity relaxation rate and fixes the scaling regime.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from types import SimpleNamespace

import numpy as np

from .errors import ConfigError, ConvergenceError, DomainError, StructuralError

try:
    import tomllib as _toml
except ModuleNotFoundError:  # python 3.10
    import tomli as _toml

CONFIG_KEYS = ("A", "B", "D", "H", "k", "eps", "c")
PARAM_KEYS = ("A", "B", "D", "H", "k", "eps")

REGIME_TAGS = ("i", "ii", "iii", "iv", "v")

# factor-10 separation heuristic used only for labeling, never in the math;
# the 1% pad keeps decade ratios reached through a rounded wave speed
# (e.g. delta = 1/(c*D) with c quoted to six digits) on the separated side
_RATIO_HI = 10.0
_RATIO_LO = 0.1
_RATIO_PAD = 0.01
_DELTA_O1 = 0.1
_DELTA_LARGE = 10.0


@dataclass(frozen=True)
class ModelParams:
    """The six model constants. All positive, with eps in (0, 1)."""

    A: float
    B: float
    H: float
    k: float
    D: float
    eps: float

    def __post_init__(self):
        for name in ("A", "B", "H", "k", "D", "eps"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise DomainError("parameter %s must be a real number" % name)
            val = float(val)
            if not math.isfinite(val) or val <= 0.0:
                raise DomainError(
                    "parameter %s must be positive and finite, got %r"
                    % (name, val))
            object.__setattr__(self, name, val)
        if self.eps >= 1.0:
            raise DomainError("eps must lie in (0, 1), got %g" % self.eps)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**{key: d[key] for key in PARAM_KEYS})


@dataclass(frozen=True)
class TWParams:
    """Wave-speed bundle: rescaled speed c, ratio delta, physical speed."""

    c: float
    delta: float
    phys_speed: float


@dataclass(frozen=True)
class StateTW:
    """A point (u, p, v, q, s) in travelling-wave phase space."""

    u: float
    p: float
    v: float
    q: float
    s: float

    def __post_init__(self):
        for name in ("u", "p", "v", "q", "s"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise DomainError("state component %s is not finite" % name)
            object.__setattr__(self, name, val)

    def as_array(self):
        return np.array([self.u, self.p, self.v, self.q, self.s])

    @classmethod
    def from_array(cls, arr):
        if len(arr) != 5:
            raise StructuralError("state vector must have 5 components")
        return cls(*(float(x) for x in arr))


@dataclass(frozen=True)
class RegimeLabel:
    """Scaling-regime tag (i..v) plus the ratio delta/eps it came from."""

    tag: str
    ratio: float


def derive_tw_params(params: ModelParams, c) -> TWParams:
    """Build TWParams from a positive rescaled speed c.

    delta = 1/(c*D) and phys_speed = eps*c, both exact.
    """
    c = float(c)
    if not math.isfinite(c) or c <= 0.0:
        raise DomainError("wave speed c must be positive, got %r" % c)
    return TWParams(c=c, delta=1.0 / (c * params.D), phys_speed=params.eps * c)


def classify_regime(eps, delta) -> RegimeLabel:
    """Label the scaling regime from the pair (eps, delta).

    Thresholds use the factor-10 separation heuristic: (i) needs
    delta/eps >= 10 with delta <= 0.1; (ii) needs delta/eps <= 0.1;
    (iv) sits between those for small delta; order-one delta gives (v)
    and delta >= 10 gives (iii).
    """
    eps = float(eps)
    delta = float(delta)
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must lie in (0, 1), got %g" % eps)
    if delta <= 0.0:
        raise DomainError("delta must be positive, got %g" % delta)
    ratio = delta / eps
    if delta > _DELTA_O1:
        tag = "iii" if delta >= _DELTA_LARGE else "v"
    elif ratio >= _RATIO_HI * (1.0 - _RATIO_PAD):
        tag = "i"
    elif ratio <= _RATIO_LO * (1.0 + _RATIO_PAD):
        tag = "ii"
    else:
        tag = "iv"
    return RegimeLabel(tag=tag, ratio=ratio)


def _reaction_terms(U, V, S, params: ModelParams):
    A, B, H, k, D = params.A, params.B, params.H, params.k, params.D
    fU = A * (1.0 - U) - U * V * V
    fV = U * V * V * (1.0 - k * V) - B * V - H * V * S
    fS = (-S + B * V + H * V * S) / D
    return fU, fV, fS


def pde_rhs(fields, params: ModelParams):
    """Time derivatives (dU, dV, dS) on a periodic grid.

    Second-order central Laplacian for U (coefficient 1) and V
    (coefficient eps^2); the S equation is local and carries the 1/D
    prefactor. ``fields`` needs U, V, S arrays and the spacing dx.
    """
    U = np.asarray(fields.U, dtype=float)
    V = np.asarray(fields.V, dtype=float)
    S = np.asarray(fields.S, dtype=float)
    if not (U.shape == V.shape == S.shape) or U.ndim != 1:
        raise StructuralError("U, V, S must be 1-d arrays of equal length")
    if U.size < 4:
        raise StructuralError("grid too small: need at least 4 cells, got %d"
                              % U.size)
    dx = float(fields.dx)
    if dx <= 0.0:
        raise DomainError("grid spacing dx must be positive")

    inv_dx2 = 1.0 / (dx * dx)
    lapU = (np.roll(U, -1) - 2.0 * U + np.roll(U, 1)) * inv_dx2
    lapV = (np.roll(V, -1) - 2.0 * V + np.roll(V, 1)) * inv_dx2
    fU, fV, fS = _reaction_terms(U, V, S, params)
    return (lapU + fU,
            params.eps ** 2 * lapV + fV,
            fS)


def tw_rhs_slow_arrays(u, p, v, q, s, params: ModelParams, c, delta):
    """Vectorized z-derivatives of the slow travelling-wave system."""
    A, B, H, k = params.A, params.B, params.H, params.k
    eps = params.eps
    du = p
    dp = u * v * v - A * (1.0 - u) - eps * c * p
    dv = q / eps
    dq = (B * v - u * v * v * (1.0 - k * v) + H * v * s - c * q) / eps
    ds = (delta / eps) * (-B * v - H * v * s + s)
    return du, dp, dv, dq, ds


def tw_rhs_slow(state: StateTW, params: ModelParams, tw: TWParams) -> StateTW:
    """z-derivative of the slow system at one phase-space point."""
    du, dp, dv, dq, ds = tw_rhs_slow_arrays(
        state.u, state.p, state.v, state.q, state.s, params, tw.c, tw.delta)
    return StateTW(du, dp, dv, dq, ds)


def tw_rhs_fast(state: StateTW, params: ModelParams, tw: TWParams) -> StateTW:
    """zeta-derivative of the fast system at one phase-space point.

    Written out independently of tw_rhs_slow; the two agree through the
    chain rule z = eps*zeta up to exact factor bookkeeping.
    """
    A, B, H, k = params.A, params.B, params.H, params.k
    eps, c, delta = params.eps, tw.c, tw.delta
    u, p, v, q, s = state.u, state.p, state.v, state.q, state.s
    du = eps * p
    dp = eps * (u * v * v - A * (1.0 - u) - eps * c * p)
    dv = q
    dq = B * v - u * v * v * (1.0 - k * v) + H * v * s - c * q
    ds = delta * (-B * v - H * v * s + s)
    return StateTW(du, dp, dv, dq, ds)


def uniform_steady_states(params: ModelParams):
    """Spatially uniform equilibria (U, V, S) of the PDE.

    Always includes the bare-soil state (1, 0, 0). Vegetated states solve
    A*(1-U) = U*V^2 together with the V- and S-balances, which reduce to
    the case_ii_v cubic; only roots with V > 0 and S >= 0 (V < 1/H) are
    physical. Each returned state is residual-checked against pde_rhs.
    """
    from .cubics import cubic_v_case_ii

    states = [(1.0, 0.0, 0.0)]
    A, B, H = params.A, params.B, params.H
    for V in cubic_v_case_ii(params).roots:
        if V <= 0.0 or H * V >= 1.0:
            continue
        U = A / (A + V * V)
        S = B * V / (1.0 - H * V)
        states.append((U, V, S))

    for U, V, S in states:
        f = SimpleNamespace(U=np.full(16, U), V=np.full(16, V),
                            S=np.full(16, S), dx=1.0)
        dU, dV, dS = pde_rhs(f, params)
        resid = max(np.abs(dU).max(), np.abs(dV).max(), np.abs(dS).max())
        if resid > 1e-10:
            raise ConvergenceError(
                "steady state (%.6g, %.6g, %.6g) has residual %.3g above 1e-10"
                % (U, V, S, resid))
    return states


def load_config(path):
    """Read a parameter config file (JSON or TOML) into a plain dict.

    Known keys are A, B, D, H, k, eps, c; anything else raises ConfigError,
    as do non-numeric values. Numbers are returned as floats.
    """
    path = str(path)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))

    if path.endswith(".toml"):
        kind = "toml"
    elif path.endswith(".json"):
        kind = "json"
    else:
        kind = "json" if raw.lstrip()[:1] == b"{" else "toml"

    if kind == "json":
        try:
            data = json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("invalid JSON: %s" % exc.msg, line=exc.lineno)
    else:
        try:
            data = _toml.loads(raw.decode("utf-8"))
        except _toml.TOMLDecodeError as exc:
            raise ConfigError("invalid TOML: %s" % exc)

    if not isinstance(data, dict):
        raise ConfigError("config must be a key-value table")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(unknown))
    out = {}
    for key, val in data.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError("config key %s must be a number, got %r"
                              % (key, val))
        out[key] = float(val)
    return out


def params_from_config(cfg) -> ModelParams:
    """Build ModelParams from a config dict, naming any missing keys."""
    missing = [key for key in PARAM_KEYS if key not in cfg]
    if missing:
        raise ConfigError("missing config keys: %s" % ", ".join(missing))
    return ModelParams(**{key: cfg[key] for key in PARAM_KEYS})
