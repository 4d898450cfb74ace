"""One-parameter groups: truncated exponential-series flows, fixed-step RK4
integration, group-law and conservation checks, complete-system completion
and solution, and numeric period detection."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import expr as E
from . import fields as F
from .fields import VectorField


class DivergenceSuspected(Exception):
    pass


class NormalizationImpossible(Exception):
    pass


@dataclass
class Trajectory:
    samples: list  # (t, point tuple), strictly increasing t
    drift: dict    # tracked-invariant label -> max |J(x(t)) - J(x(0))|

    @property
    def endpoint(self):
        return self.samples[-1][1]


@dataclass(frozen=True)
class FlowRequest:
    field: VectorField
    start: object            # Point or coordinate sequence
    t: float
    method: str = "rk4"      # "lie_series" or "rk4"
    order: int = 24          # lie_series truncation order, >= 1
    steps: int = 10000       # rk4 step count, >= 1

    def __post_init__(self):
        if self.method not in ("lie_series", "rk4"):
            raise ValueError("method must be 'lie_series' or 'rk4'")
        if self.order < 1 or self.steps < 1:
            raise ValueError("order and steps must be >= 1")


def run_flow(request: FlowRequest):
    """Dispatch a FlowRequest; returns the endpoint tuple."""
    if request.method == "lie_series":
        point, _ = lie_series_flow(request.field, request.start, request.t, request.order)
        return point
    return numeric_flow(request.field, request.start, request.t, request.steps).endpoint


# ---------------------------------------------------------------------------
# series flow

_SERIES_DEFAULT_ORDER = 24
_SERIES_RETRY_THRESHOLD = 1e-10


def _poly_tables(X: VectorField):
    """Coefficient monomial tables [(float coeff, exponent tuple), ...]."""
    tables = []
    for c in X.coeffs:
        if not E.is_polynomial(c):
            raise E.NonPolynomialError("series flow needs polynomial coefficients")
        rows = []
        for expo, val in E.poly_coefficients(c, X.dim).items():
            cv = val.constant_value()
            if cv is None:
                raise E.ExprError("instantiate parameters before integrating")
            rows.append((float(cv), expo))
        tables.append(rows)
    return tables


def _series_mul_trunc(a: list, b: list, order: int) -> list:
    out = [0.0] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0.0:
            continue
        top = order - i
        for j, bj in enumerate(b[: top + 1]):
            if bj != 0.0:
                out[i + j] += ai * bj
    return out


def _flow_series(X: VectorField, x0: Sequence[float], order: int) -> list:
    """Taylor coefficients a[k][i] of the flow x_i(t) = sum_k a[k][i] t^k,
    built from the coefficient recurrence a_{k+1} = xi(x(t))_k / (k+1)."""
    n = X.dim
    tables = _poly_tables(X)
    series = [[0.0] * (order + 1) for _ in range(n)]
    for i in range(n):
        series[i][0] = float(x0[i])
    for k in range(order):
        for i in range(n):
            acc = 0.0
            for coeff, expo in tables[i]:
                prod = [0.0] * (order + 1)
                prod[0] = 1.0
                for v, e in enumerate(expo):
                    for _ in range(e):
                        prod = _series_mul_trunc(prod, series[v], k)
                acc += coeff * prod[k]
            series[i][k + 1] = acc / (k + 1)
    return series


def lie_series_flow(X: VectorField, x0, t: float,
                    order: int = _SERIES_DEFAULT_ORDER) -> Tuple[tuple, float]:
    """Truncated exponential flow sum_{k<=order} t^k/k! X^k(x_i) at x0.
    Returns (endpoint, estimate) with estimate the norm of the last retained
    term; the order is doubled once if the estimate exceeds 1e-10, and a
    growing tail raises DivergenceSuspected."""
    x0 = F._as_point(x0)
    start = [float(v) for v in x0.coords]

    def attempt(n_order):
        series = _flow_series(X, start, n_order)
        point = []
        last = 0.0
        first = 0.0
        for i in range(X.dim):
            acc = 0.0
            tk = 1.0
            for k in range(n_order + 1):
                acc += series[i][k] * tk
                tk *= t
            point.append(acc)
            last = max(last, abs(series[i][n_order] * t**n_order))
            first = max(first, abs(series[i][1] * t))
        return tuple(point), last, first

    point, last, first = attempt(order)
    if last > _SERIES_RETRY_THRESHOLD:
        point, last, first = attempt(order * 2)
    if first > 0 and last >= 1e3 * first:
        raise DivergenceSuspected(
            f"series tail {last:.3e} exceeds 1e3 x first term {first:.3e}")
    return point, last


# ---------------------------------------------------------------------------
# RK4 flow


def numeric_flow(X: VectorField, x0, t: float, steps: int,
                 tracked: Optional[dict] = None, record: bool = False) -> Trajectory:
    """Classical fixed-step fourth-order integration. tracked maps labels to
    Expr invariants whose drift along the trajectory is recorded."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x0 = F._as_point(x0)
    params = {k: float(v) for k, v in x0.params.items()}
    funcs = X.compiled()
    state = [float(v) for v in x0.coords]
    h = t / steps

    def rhs(y):
        return [f(y, params) for f in funcs]

    tracked = tracked or {}
    tracked_fns = {label: E.compile_numeric(body) for label, body in tracked.items()}
    initial = {label: fn(state, params) for label, fn in tracked_fns.items()}
    drift = {label: 0.0 for label in tracked_fns}
    samples = [(0.0, tuple(state))]
    for step in range(steps):
        k1 = rhs(state)
        y2 = [s + 0.5 * h * k for s, k in zip(state, k1)]
        k2 = rhs(y2)
        y3 = [s + 0.5 * h * k for s, k in zip(state, k2)]
        k3 = rhs(y3)
        y4 = [s + h * k for s, k in zip(state, k3)]
        k4 = rhs(y4)
        state = [
            s + h / 6.0 * (a + 2 * b + 2 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        ]
        for label, fn in tracked_fns.items():
            drift[label] = max(drift[label], abs(fn(state, params) - initial[label]))
        if record or step == steps - 1:
            samples.append(((step + 1) * h, tuple(state)))
    return Trajectory(samples, drift)


def one_param_group_law_check(X: VectorField, x0, t1: float, t2: float,
                              steps: int = 4000) -> float:
    """Max-norm deviation of flow(flow(x0, t1), t2) from flow(x0, t1 + t2)."""
    leg1 = numeric_flow(X, x0, t1, steps).endpoint
    leg2 = numeric_flow(X, F.Point(leg1, F._as_point(x0).params), t2, steps).endpoint
    direct = numeric_flow(X, x0, t1 + t2, steps).endpoint
    return max(abs(a - b) for a, b in zip(leg2, direct))


# ---------------------------------------------------------------------------
# complete systems


def _function_span_rank(fields_: Sequence[VectorField], seed: int, points: int = 8):
    """Pointwise max rank used for function-span decisions."""
    return F.generic_rank(fields_, seed=seed, points=points)


def complete_system_complete(fields_: Sequence[VectorField], seed: int = 0):
    """Prune function-dependent inputs, then adjoin brackets falling outside
    the function span until stable. Returns (completed fields, log)."""
    log = []
    kept: List[VectorField] = []
    for i, f in enumerate(fields_):
        if f.is_zero:
            log.append(f"dropped zero field #{i + 1}")
            continue
        trial = kept + [f]
        if _function_span_rank(trial, seed, points=12) > (
            _function_span_rank(kept, seed, points=12) if kept else 0
        ):
            kept.append(f)
        else:
            log.append(f"pruned function-dependent field #{i + 1}")
    n = kept[0].dim if kept else 0
    changed = True
    while changed:
        changed = False
        current_rank = _function_span_rank(kept, seed, points=12)
        if current_rank >= n:
            break
        for i in range(len(kept)):
            for j in range(i + 1, len(kept)):
                B = F.bracket(kept[i], kept[j])
                if B.is_zero:
                    continue
                trial = kept + [B]
                if _function_span_rank(trial, seed, points=12) > current_rank:
                    kept.append(B)
                    log.append(f"adjoined [#{i + 1}, #{j + 1}]")
                    changed = True
                    break
            if changed:
                break
    return kept, log


def completion_certificate(fields_: Sequence[VectorField], seed: int = 0) -> bool:
    """Re-verify that all pairwise brackets lie in the function span."""
    base_rank = _function_span_rank(fields_, seed, points=12)
    for i in range(len(fields_)):
        for j in range(i + 1, len(fields_)):
            B = F.bracket(fields_[i], fields_[j])
            if B.is_zero:
                continue
            if _function_span_rank(list(fields_) + [B], seed, points=12) > base_rank:
                return False
    return True


def complete_system_solve_single(X: VectorField, pivot: int, order: int = 24,
                                 seed: int = 0):
    """Solutions of X(w) = 0 via the exponential construction: after exact
    division making X(x_pivot) = 1, w_k = sum_l (-x_pivot)^l / l! X^l(x_k).
    Terminating series are verified exactly; truncated ones numerically at 16
    random points below 1e-10."""
    c = X.coeffs[pivot]
    if E.is_identically_zero(c) is E.Zeroness.YES:
        raise NormalizationImpossible("field does not move the pivot variable")
    inv = E.inverse(c)
    divided = c.constant_value() != 1
    Xn = VectorField(X.dim, tuple(E.mul(inv, ci) for ci in X.coeffs))
    pivot_var = E.var(pivot)
    solutions = []
    exact_flags = []
    for k in range(X.dim):
        if k == pivot:
            continue
        term = E.var(k)
        acc = term
        factorial = 1
        exact = False
        for l in range(1, order + 1):
            term = F.apply_to_function(Xn, term)
            if term.is_zero:
                exact = True
                break
            factorial *= l
            piece = E.mul(E.const(Fraction((-1) ** l, factorial)), E.mul(E.intpow(pivot_var, l), term))
            acc = E.add(acc, piece)
        solutions.append(acc)
        exact_flags.append(exact)
    # verification
    rng = random.Random(seed)
    for w, exact in zip(solutions, exact_flags):
        residual = F.apply_to_function(Xn, w)
        if exact:
            if E.is_identically_zero(residual) is not E.Zeroness.YES:
                raise NormalizationImpossible("terminating series failed symbolic check")
        else:
            checked = 0
            attempts = 0
            while checked < 16 and attempts < 400:
                attempts += 1
                coords = [rng.uniform(-1, 1) for _ in range(X.dim)]
                try:
                    v = E.evaluate_numeric(residual, coords)
                except (E.DomainError, OverflowError):
                    continue
                if abs(v) >= 1e-10:
                    raise NormalizationImpossible(
                        f"truncated solution residual {v:.3e} at {coords}")
                checked += 1
    return solutions, {"divided": divided, "exact": exact_flags}


# ---------------------------------------------------------------------------
# monodromy


def _first_return(X: VectorField, x0, t_max: float, tol: float, steps: int):
    """First t > tol with ||x(t) - x0|| < tol, bracketed on the coarse
    trajectory then refined by golden-section on the distance."""
    x0 = F._as_point(x0)
    traj = numeric_flow(X, x0, t_max, steps, record=True)
    start = [float(v) for v in x0.coords]

    def dist(pt):
        return max(abs(a - b) for a, b in zip(pt, start))

    ds = [(t, dist(pt)) for t, pt in traj.samples]
    max_d = max(d for _, d in ds)
    if max_d < 10 * tol:
        return None, 0.0  # point effectively at rest under this generator
    depart_level = max(10 * tol, max_d / 4)
    qualify = max(1000 * tol, max_d / 50)

    def refine(idx):
        """Golden-section minimum of the distance around coarse sample idx."""
        lo_t = ds[idx - 1][0]
        hi_t = ds[min(idx + 1, len(ds) - 1)][0]
        anchor = F.Point(traj.samples[idx - 1][1], x0.params)

        def d_at(t):
            if t <= lo_t:
                return ds[idx - 1][1]
            return dist(numeric_flow(X, anchor, t - lo_t, 400).endpoint)

        phi = (math.sqrt(5.0) - 1) / 2
        a, b = lo_t, hi_t
        c1 = b - phi * (b - a)
        c2 = a + phi * (b - a)
        f1, f2 = d_at(c1), d_at(c2)
        for _ in range(60):
            if b - a < 1e-12:
                break
            if f1 < f2:
                b, c2, f2 = c2, c1, f1
                c1 = b - phi * (b - a)
                f1 = d_at(c1)
            else:
                a, c1, f1 = c1, c2, f2
                c2 = a + phi * (b - a)
                f2 = d_at(c2)
        t_star = (a + b) / 2
        return t_star, d_at(t_star)

    departed = False
    best_miss = max_d
    refinements = 0
    for idx in range(1, len(ds) - 1):
        t, d = ds[idx]
        if not departed:
            if d > depart_level:
                departed = True
            continue
        if t <= tol:
            continue
        if ds[idx - 1][1] > d <= ds[idx + 1][1] and d < qualify:
            t_star, d_star = refine(idx)
            best_miss = min(best_miss, d_star)
            refinements += 1
            if d_star < tol:
                return t_star, d_star
            if refinements >= 60:
                break
    return None, best_miss


def monodromy_period(X: VectorField, x0, t_max: float = 20.0, tol: float = 1e-6,
                     steps: int = 20000, starts: int = 8, seed: int = 0,
                     scale: float = 1.0):
    """Common first-return time of the flow, validated at `starts` distinct
    random start points (all must agree within tol). None when any trajectory
    fails to return, with min-distance diagnostics."""
    rng = random.Random(seed)
    x0 = F._as_point(x0)
    n = X.dim
    periods = []
    diagnostics = []
    produced = 0
    attempts = 0
    while produced < starts and attempts < 20 * starts:
        attempts += 1
        if produced == 0 and attempts == 1:
            start = x0
        else:
            start = F.Point(
                tuple(c + rng.uniform(-scale, scale) for c in x0.coords), x0.params
            )
        try:
            t_star, d = _first_return(X, start, t_max, tol, steps)
        except E.DomainError:
            continue
        if t_star is None and d == 0.0:
            continue  # start point at rest: resample
        produced += 1
        diagnostics.append((start.coords, t_star, d))
        if t_star is None:
            return None, diagnostics
        periods.append(t_star)
    if produced < starts:
        return None, diagnostics
    spread = max(periods) - min(periods)
    if spread > tol:
        return None, diagnostics
    return sum(periods) / len(periods), diagnostics
