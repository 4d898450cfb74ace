"""Finite and infinitesimal invariants: annihilation checks for multi-point
candidates, existence of invariants of infinitely-near points, the arc-length
homogeneity criterion, Lie derivatives of quadratic forms, essentialness of
multi-point invariants, and a pseudosphere sampling helper."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import algebra as A, exactla, expr as E
from . import fields as F
from .fields import VectorField


class Verdict(Enum):
    PROVEN = "Proven"
    NUMERICALLY_SUPPORTED = "NumericallySupported"
    REFUTED = "Refuted"


class DomainExhausted(Exception):
    pass


class MissingPairInvariant(Exception):
    pass


@dataclass(frozen=True)
class InvariantCandidate:
    s: int
    body: E.Expr


@dataclass(frozen=True)
class VerificationOutcome:
    verdict: Verdict
    witness_generator: Optional[int] = None
    witness_residual: Optional[E.Expr] = None
    witness_value: Optional[float] = None


@dataclass(frozen=True)
class QuadraticForm:
    dim: int
    entries: tuple  # n x n symmetric tuple of tuples of Expr

    def __post_init__(self):
        for i in range(self.dim):
            for j in range(self.dim):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("quadratic form must be exactly symmetric")


def identity_form(dim: int) -> QuadraticForm:
    rows = tuple(
        tuple(E.ONE if i == j else E.ZERO for j in range(dim)) for i in range(dim)
    )
    return QuadraticForm(dim, rows)


_NUM_CONFIGS = 32
_NUM_TOL = 1e-8
_SAMPLE_CAP = 800


def _sample_in_domain(exprs: Sequence[E.Expr], nvars: int, rng: random.Random,
                      params=None, spread: float = 2.0):
    for _ in range(_SAMPLE_CAP):
        coords = [rng.uniform(-spread, spread) for _ in range(nvars)]
        try:
            values = [E.evaluate_numeric(e, coords, params) for e in exprs]
        except (E.DomainError, OverflowError):
            continue
        return coords, values
    raise DomainExhausted(f"no in-domain configuration found in {_SAMPLE_CAP} draws")


def verify_joint_invariant(L: A.LieAlgebraPresentation, J: InvariantCandidate,
                           mode: str = "symbolic", seed: int = 0,
                           param_values=None) -> VerificationOutcome:
    """Apply every point-prolonged generator to the candidate.

    Symbolic mode proves annihilation exactly (zero after clearing
    denominators); surviving transcendental UNKNOWNs fall back to the numeric
    check. Numeric mode demands |value| < 1e-8 at 32 random in-domain
    configurations."""
    if mode not in ("symbolic", "numeric"):
        raise ValueError("mode must be 'symbolic' or 'numeric'")
    prolonged = [F.prolong_points(g, J.s) for g in L.generators]
    residuals = []
    for g in prolonged:
        res = F.apply_to_function(g, J.body)
        if param_values:
            res = E.substitute_params(res, param_values)
        residuals.append(res)
    pending = []
    if mode == "symbolic":
        for k, res in enumerate(residuals):
            z = E.is_identically_zero(res, seed=seed)
            if z is E.Zeroness.NO:
                value = _witness_value(res, L.dim * J.s, seed, param_values)
                return VerificationOutcome(Verdict.REFUTED, k, res, value)
            if z is E.Zeroness.UNKNOWN:
                pending.append(k)
        if not pending:
            return VerificationOutcome(Verdict.PROVEN)
        check = [residuals[k] for k in pending]
    else:
        pending = list(range(len(residuals)))
        check = residuals
    rng = random.Random(seed)
    pidx = set()
    for res in check:
        pidx |= E.used_params(res)
    params = {j: float(F.random_nonspecial_rational(rng)) for j in pidx}
    if param_values:
        params.update({j: float(v) for j, v in param_values.items()})
    for _ in range(_NUM_CONFIGS):
        coords, values = _sample_in_domain(check, L.dim * J.s, rng, params)
        for k, v in zip(pending, values):
            if abs(v) >= _NUM_TOL:
                return VerificationOutcome(Verdict.REFUTED, k, residuals[k], v)
    return VerificationOutcome(Verdict.NUMERICALLY_SUPPORTED)


def _witness_value(res: E.Expr, nvars: int, seed: int, param_values=None):
    rng = random.Random(seed)
    pidx = E.used_params(res)
    params = {j: float(F.random_nonspecial_rational(rng)) for j in pidx}
    if param_values:
        params.update({j: float(v) for j, v in param_values.items()})
    try:
        _, values = _sample_in_domain([res], nvars, rng, params)
    except DomainExhausted:
        return None
    return values[0]


# ---------------------------------------------------------------------------
# infinitesimal invariants


def _isotropy_row_rank(mats, n, seed: int) -> int:
    """Generic rank over x' of the rows (J_k x')^T of the linear isotropy."""
    rng = random.Random(seed)
    best = 0
    for _ in range(8):
        v = [F.random_rational(rng) for _ in range(n)]
        rows = []
        for J in mats:
            row = []
            for nu in range(n):
                acc = Fraction(0)
                for mu in range(n):
                    cv = J[nu][mu].constant_value()
                    if cv is None:
                        raise E.ExprError("instantiate parameters before rank test")
                    acc += cv * v[mu]
                row.append(acc)
            rows.append(row)
        if rows:
            best = max(best, exactla.rank(rows))
    return best


def infinitesimal_invariant_exists(L: A.LieAlgebraPresentation, seed: int = 0,
                                   param_values=None) -> bool:
    """True iff two infinitely-near points carry an invariant: the linear
    isotropy at a generic point must have generic row rank < dim on the primed
    block. Intransitive algebras always qualify."""
    if not A.is_transitive(L, seed=seed, param_values=param_values):
        return True
    coords, params = A.find_generic_point(L, seed=seed, param_values=param_values)
    mats = A.linear_isotropy_group(L, F.Point(coords), params)
    if not mats:
        return False
    return _isotropy_row_rank(mats, L.dim, seed) < L.dim


def infinitesimal_invariant_exists_by_prolongation(L: A.LieAlgebraPresentation,
                                                   seed: int = 0, param_values=None) -> bool:
    """Cross-check route: the differential-prolonged generators leave a common
    invariant iff their generic rank at (x, x') with x' != 0 stays below 2n."""
    n = L.dim
    prolonged = [F.prolong_differentials(g) for g in L.generators]

    def primed_nonzero(coords):
        return any(coords[n + i] != 0 for i in range(n))

    rank = F.generic_rank(prolonged, seed=seed, param_values=param_values,
                          point_filter=primed_nonzero)
    return rank < 2 * n


def arc_length_invariant_exists(L: A.LieAlgebraPresentation, seed: int = 0,
                                param_values=None) -> bool:
    """True iff an invariant of infinitely-near points exists and the identity
    matrix is not a combination of the linear isotropy matrices (otherwise all
    such invariants are homogeneous of order zero)."""
    if not A.is_transitive(L, seed=seed, param_values=param_values):
        raise ValueError("arc-length criterion defined for transitive algebras")
    coords, params = A.find_generic_point(L, seed=seed, param_values=param_values)
    mats = A.linear_isotropy_group(L, F.Point(coords), params)
    if not mats:
        return False
    if _isotropy_row_rank(mats, L.dim, seed) >= L.dim:
        return False
    n = L.dim
    rows = []
    for J in mats:
        rows.append([J[i][j].constant_value() for i in range(n) for j in range(n)])
    identity_vec = [Fraction(1) if i == j else Fraction(0) for i in range(n) for j in range(n)]
    with_id = rows + [identity_vec]
    return exactla.rank(with_id) != exactla.rank(rows)


# ---------------------------------------------------------------------------
# Lie derivative of a quadratic form


def lie_derivative_quadratic_form(X: VectorField, g: QuadraticForm) -> QuadraticForm:
    """(L_X g)_ij = X(g_ij) + sum_k g_kj d(xi_k)/d(x_i) + sum_k g_ik d(xi_k)/d(x_j)."""
    if X.dim != g.dim:
        raise ValueError("dimension mismatch")
    n = X.dim
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = F.apply_to_function(X, g.entries[i][j])
            for k in range(n):
                acc = E.add(acc, E.mul(g.entries[k][j], E.differentiate(X.coeffs[k], i)))
                acc = E.add(acc, E.mul(g.entries[i][k], E.differentiate(X.coeffs[k], j)))
            row.append(acc)
        rows.append(tuple(row))
    return QuadraticForm(n, tuple(rows))


# ---------------------------------------------------------------------------
# essential invariants


def _gradient_rank(bodies: Sequence[E.Expr], nvars: int, seed: int, params=None) -> int:
    """Number of functionally independent expressions: rank of the gradient
    matrix at 8 random configurations; exact when the gradients are rational,
    numeric SVD with a 1e-8 singular-value threshold otherwise."""
    grads = [[E.differentiate(b, v) for v in range(nvars)] for b in bodies]
    exact = all(not E.contains_fn(d) for row in grads for d in row)
    rng = random.Random(seed)
    best = 0
    configs = 0
    attempts = 0
    while configs < 8 and attempts < 400:
        attempts += 1
        if exact:
            coords = [F.random_rational(rng) for _ in range(nvars)]
            try:
                matrix = [[E.evaluate_exact(d, coords, params) for d in row] for row in grads]
            except (E.DomainError, E.NonPolynomialError):
                continue
            best = max(best, exactla.rank(matrix))
        else:
            coords = [rng.uniform(-2, 2) for _ in range(nvars)]
            fparams = {j: float(v) for j, v in (params or {}).items()}
            try:
                matrix = np.array(
                    [[E.evaluate_numeric(d, coords, fparams) for d in row] for row in grads]
                )
            except (E.DomainError, OverflowError):
                continue
            scale = np.abs(matrix).max(axis=1, keepdims=True)
            scale[scale == 0] = 1.0
            sv = np.linalg.svd(matrix / scale, compute_uv=False)
            best = max(best, int(np.sum(sv > _NUM_TOL)))
        configs += 1
    if configs == 0:
        raise DomainExhausted("no admissible configuration for gradient rank")
    return best


def pair_invariant_pullbacks(J: InvariantCandidate, n: int, s: int) -> List[E.Expr]:
    """All s(s-1)/2 copies of a two-point invariant on the s-point space."""
    if J.s != 2:
        raise ValueError("pullbacks need a two-point invariant")
    out = []
    for lam in range(s):
        for mu in range(lam + 1, s):
            mapping = {}
            for i in range(n):
                mapping[i] = E.var(lam * n + i)
                mapping[n + i] = E.var(mu * n + i)
            out.append(E.substitute_vars(J.body, mapping))
    return out


def essential_invariant_check(L: A.LieAlgebraPresentation, s: int, seed: int = 0,
                              pair_invariants: Sequence[InvariantCandidate] = (),
                              param_values=None) -> bool:
    """True iff s points carry an invariant not expressible through the pair
    invariants: joint count at s exceeds the number of functionally
    independent pair-invariant pullbacks."""
    if s < 3:
        raise ValueError("essentialness concerns s >= 3")
    count = A.joint_invariant_count(L, s, seed=seed, param_values=param_values)
    if not pair_invariants:
        if A.joint_invariant_count(L, 2, seed=seed, param_values=param_values) != 0:
            raise MissingPairInvariant(
                "a pair-invariant formula is required when two points have one")
        independent = 0
    else:
        bodies = []
        for J in pair_invariants:
            bodies.extend(pair_invariant_pullbacks(J, L.dim, s))
        independent = _gradient_rank(bodies, L.dim * s, seed, params=param_values)
    return count > independent


# ---------------------------------------------------------------------------
# pseudosphere sampling


def sample_pseudosphere_points(J: InvariantCandidate, center: Sequence[float],
                               level: float, n: int, seed: int = 0, count: int = 8,
                               params=None) -> List[tuple]:
    """Points x with J(center; x) = level, found by sign-change bracketing of
    the level function along random rays, then bisection."""
    rng = random.Random(seed)
    out = []

    def value(pt):
        coords = list(center) + list(pt)
        return E.evaluate_numeric(J.body, coords, params) - level

    def bisect(origin, direction, lo, hi, sign_lo):
        for _ in range(60):
            mid = (lo + hi) / 2
            pm = [o + mid * d for o, d in zip(origin, direction)]
            try:
                vm = value(pm)
            except (E.DomainError, OverflowError):
                return None
            if vm == 0:
                return mid
            if (vm < 0) == sign_lo:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    attempts = 0
    while len(out) < count and attempts < 300 * count:
        attempts += 1
        origin = [rng.uniform(-2, 2) for _ in range(n)]
        direction = [rng.uniform(-1, 1) for _ in range(n)]
        prev_t, prev_v = None, None
        for k in range(1, 65):
            t = k / 16
            pt = [o + t * d for o, d in zip(origin, direction)]
            try:
                v = value(pt)
            except (E.DomainError, OverflowError):
                prev_t, prev_v = None, None
                continue
            if prev_v is not None and (v == 0 or (v < 0) != (prev_v < 0)):
                root = t if v == 0 else bisect(origin, direction, prev_t, t, prev_v < 0)
                if root is not None:
                    out.append(tuple(o + root * d for o, d in zip(origin, direction)))
                break
            prev_t, prev_v = t, v
    if len(out) < count:
        raise DomainExhausted("could not populate the pseudosphere sample")
    return out
