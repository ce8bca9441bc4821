"""Normalized tetration, its inverse, and fractional exponential iteration.

The variable-exponent F is real and increasing on part of the positive real
axis; calibration locates the shift x0 with F(x0) = 1 by bisection.  The
normalized function is then evaluated by a step recursion anchored to the
base strip Re(s) in (-1, 0]:

    tet(s) = F(s + x0)            Re(s) in (-1, 0]
    tet(s) = e^{tet(s-1)}         Re(s) > 0
    tet(s) = log(tet(s+1))        Re(s) <= -1, principal branch

so tet(0) = 1, tet(1) = e, tet(-1) = 0 hold to calibration accuracy and
tet(s+1) = e^{tet(s)} holds exactly by construction.  The inverse slog is
implemented on the branch reaching the real base interval [0, e]: Newton
iteration against a precomputed monotone table, with log/exp reductions
outside it.
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .beta import VARIABLE, BetaParams
from .errors import (
    BRANCH_CUT,
    OK,
    SHORT_CIRCUIT,
    OVERFLOW_GUARD,
    BranchCut,
    CalibrationFailed,
    DomainError,
    NoConvergence,
    raise_for_status,
)
from .tau import F_grid, TauConfig

PROFILES = {
    "default": (8, 5),
    "high": (100, 20),
}

_SCAN_LO, _SCAN_HI = -5, 10
_CUT_DIST = 1e-9
_E = math.e


@dataclass(frozen=True, eq=False)
class TetModel:
    """Calibrated tetration: normalization shift, depth profile, slog table."""

    x0: float
    n: int
    k: int
    theta: float = math.pi / 4          # sector half-angle for the variable map
    base_strip: tuple = (-1.0, 0.0)
    table_x: np.ndarray = None
    table_v: np.ndarray = None
    profile: str = "custom"

    @property
    def config(self):
        return TauConfig(n=self.n, k=self.k, scheme="variable_lambda")

    @property
    def params(self):
        return BetaParams(lam=VARIABLE, depth=self.n)


def _f_line(xs, n, k):
    params = BetaParams(lam=VARIABLE, depth=n)
    config = TauConfig(n=n, k=k, scheme="variable_lambda")
    return F_grid(params, config, np.asarray(xs, np.complex128))


def calibrate(profile="default", n=None, k=None):
    """Locate x0 with F(x0) = 1 and build a TetModel.

    The bracket is found by scanning integer steps on [-5, 10] for a sign
    change of F - 1 where F is real, evaluable, and increasing; bisection
    then runs to double-precision width.
    """
    if n is None or k is None:
        try:
            n, k = PROFILES[profile]
        except KeyError:
            raise ValueError(f"unknown profile {profile!r}; use one of {sorted(PROFILES)}") from None
    xs = np.arange(float(_SCAN_LO), float(_SCAN_HI) + 0.5)
    Fv, st = _f_line(xs, n, k)
    bracket = None
    for i in range(len(xs) - 1):
        if st[i] != OK or st[i + 1] != OK:
            continue
        if abs(Fv[i].imag) > 1e-9 or abs(Fv[i + 1].imag) > 1e-9:
            continue
        lo, hi = Fv[i].real, Fv[i + 1].real
        if hi <= lo:
            continue
        if (lo - 1.0) < 0 <= (hi - 1.0):
            bracket = (float(xs[i]), float(xs[i + 1]))
            break
    if bracket is None:
        raise CalibrationFailed(
            f"no increasing real bracket of F(x)=1 on [{_SCAN_LO}, {_SCAN_HI}] "
            f"at depth profile n={n}, k={k}")
    lo, hi = bracket
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm, sm = _f_line([mid], n, k)
        if sm[0] != OK:
            raise CalibrationFailed(f"F not evaluable at bisection point {mid}")
        if fm[0].real - 1.0 < 0:
            lo = mid
        else:
            hi = mid
    x0 = 0.5 * (lo + hi)

    table_x = np.linspace(-1.0, 1.0, 257)
    tv, ts = _tet_arrays(table_x, x0, n, k)
    if not np.all(ts == OK):
        raise CalibrationFailed("base-interval table not evaluable")
    table_v = tv.real
    if not np.all(np.diff(table_v) > 0):
        raise CalibrationFailed("tetration not increasing on the base interval")
    prof = profile if (n, k) == PROFILES.get(profile, (None, None)) else "custom"
    model = TetModel(x0=x0, n=n, k=k, table_x=table_x, table_v=table_v, profile=prof)
    anchor = abs(complex(tet_eval(model, 0.0)) - 1.0)
    if anchor > 1e-10:
        raise CalibrationFailed(f"|tet(0) - 1| = {anchor:.3g} after bisection")
    return model


def _tet_arrays(Z, x0, n, k):
    """Step-recursion evaluation over an array; returns (values, status)."""
    Z = np.atleast_1d(np.asarray(Z, np.complex128))
    status = np.zeros(Z.shape, np.int8)
    # distance to the cut (-inf, -2]
    on_tail = Z.real <= -2.0
    dist = np.where(on_tail, np.abs(Z.imag), np.abs(Z - (-2.0)))
    status[dist < _CUT_DIST] = BRANCH_CUT
    steps = np.ceil(Z.real).astype(np.int64)
    steps[status != OK] = 0
    base = Z - steps + x0
    vals, fst = _f_line(base.ravel(), n, k)
    vals = vals.reshape(Z.shape)
    fst = fst.reshape(Z.shape)
    ok = status == OK
    status[ok] = fst[ok]
    with np.errstate(all="ignore"):
        up = int(steps.max(initial=0))
        for step in range(1, up + 1):
            m = (steps >= step) & (status == OK)
            ovf = m & (vals.real > OVERFLOW_GUARD)
            status[ovf] = SHORT_CIRCUIT
            m &= ~ovf
            vals[m] = np.exp(vals[m])
        down = int(-steps.min(initial=0))
        for step in range(1, down + 1):
            m = (steps <= -step) & (status == OK)
            tiny = m & (np.abs(vals) < 1e-300)
            oncut = m & (vals.real <= 0) & (np.abs(vals.imag) <= 1e-12 * np.abs(vals.real))
            status[tiny | oncut] = SHORT_CIRCUIT
            m &= ~(tiny | oncut)
            vals[m] = np.log(vals[m])
    return vals, status


def tet_grid(model, Z):
    """Vectorized tetration; returns (values, status) with the input shape."""
    Z = np.asarray(Z, np.complex128)
    shape = Z.shape if Z.shape else (1,)
    v, st = _tet_arrays(Z.reshape(shape), model.x0, model.n, model.k)
    return v, st


def tet_eval(model, s):
    """Scalar tetration; raises BranchCut / ShortCircuit on failure."""
    v, st = _tet_arrays(np.array([complex(s)]), model.x0, model.n, model.k)
    code = int(st[0])
    if code == BRANCH_CUT:
        raise BranchCut(f"s={s} within {_CUT_DIST:g} of the cut (-inf, -2]")
    raise_for_status(code, f"tet({s})")
    return complex(v[0])


_NEWTON_STEPS = 100
_NEWTON_H = 1e-6
_REDUCE_MAX = 64


def slog_eval(model, z):
    """Inverse of tet on the branch through the real base interval [0, e].

    Reductions: slog(z) = slog(log z) + 1 for |z| > e and
    slog(z) = slog(e^z) - 1 for real z below the interval; inside, Newton
    iteration on tet seeded from the calibration table.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("slog of non-finite value")
    shift = 0
    for _ in range(_REDUCE_MAX):
        if abs(z.imag) < 1e-12 and 0.0 <= z.real <= _E + 1e-12:
            break
        if abs(z) > _E:
            z = cmath.log(z)
            shift += 1
        elif abs(z.imag) < 1e-12 and z.real < 0.0:
            z = cmath.exp(z)
            shift -= 1
        else:
            raise DomainError(
                f"z={z} does not reach the real base interval by exp/log steps")
    else:
        raise DomainError(f"reduction did not reach the base interval in {_REDUCE_MAX} steps")

    target = z.real
    sg = float(np.interp(target, model.table_v, model.table_x))
    for _ in range(_NEWTON_STEPS):
        err = tet_eval(model, sg).real - target
        if abs(err) < 1e-12 * max(1.0, abs(target)):
            return complex(sg + shift)
        d = (tet_eval(model, sg + _NEWTON_H).real - tet_eval(model, sg - _NEWTON_H).real) / (2 * _NEWTON_H)
        if d == 0.0 or not math.isfinite(d):
            raise NoConvergence(f"flat derivative at s={sg}")
        sg -= err / d
    raise NoConvergence(f"Newton did not converge for slog({z})")


def exp_iter(model, s, z):
    """Fractional iteration exp o^s (z) = tet(s + slog(z))."""
    return tet_eval(model, complex(s) + slog_eval(model, z))


class ScanResult(NamedTuple):
    all_positive: bool
    min_derivative: float
    truncated_at: float | None

    def __bool__(self):
        return self.all_positive


def derivative_positivity_scan(model, lo=-1.9, hi=3.0, step=0.05):
    """Central-difference derivative of tet > 0 at every real grid point.

    A ShortCircuit truncates the scan; the result records where.
    """
    h = 1e-4
    xs = np.arange(lo, hi + step * 0.5, step)
    vp, sp = tet_grid(model, xs + h)
    vm, sm = tet_grid(model, xs - h)
    good = (sp == OK) & (sm == OK)
    truncated_at = None
    if not good.all():
        first_bad = int(np.argmin(good))
        truncated_at = float(xs[first_bad])
        xs, vp, vm = xs[:first_bad], vp[:first_bad], vm[:first_bad]
    if xs.size == 0:
        return ScanResult(False, math.nan, truncated_at)
    deriv = (vp.real - vm.real) / (2 * h)
    return ScanResult(bool((deriv > 0).all()), float(deriv.min()), truncated_at)


_MODEL_CACHE = {}


def get_model(profile="default", n=None, k=None):
    """Calibrate once per depth profile and cache the model."""
    key = (profile, n, k)
    if key not in _MODEL_CACHE:
        _MODEL_CACHE[key] = calibrate(profile=profile, n=n, k=k)
    return _MODEL_CACHE[key]
