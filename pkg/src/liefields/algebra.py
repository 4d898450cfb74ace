"""Lie-algebra-level structure: closure and structure constants, Jacobi
verification, transitivity, isotropy, linearized isotropy, reduced algebra,
joint invariant counting and the two-point determinant criterion."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import exactla, expr as E
from . import fields as F
from .fields import VectorField


class NotClosedError(Exception):
    def __init__(self, j: int, k: int, residual: VectorField):
        super().__init__(f"[X{j + 1}, X{k + 1}] leaves the constant span")
        self.j = j
        self.k = k
        self.residual = residual


class NotTransitiveAtBase(Exception):
    pass


@dataclass(frozen=True)
class LieAlgebraPresentation:
    name: str
    vars: tuple
    params: tuple
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def dim(self) -> int:
        return len(self.vars)

    @property
    def order(self) -> int:
        return len(self.generators)

    def validate(self, seed: int = 0) -> None:
        if any(g.dim != self.dim for g in self.generators):
            raise F.FieldError("generator dimension mismatch")
        if not F.linear_independence_over_constants(list(self.generators), seed=seed):
            raise F.FieldError(f"{self.name}: generators dependent over constants")

    def with_param_values(self, values: Mapping[int, Fraction]) -> "LieAlgebraPresentation":
        gens = tuple(
            VectorField(g.dim, tuple(E.substitute_params(c, values) for c in g.coeffs))
            for g in self.generators
        )
        return LieAlgebraPresentation(self.name, self.vars, self.params, gens)


def presentation(name: str, vars: Sequence[str], generators: Sequence[str],
                 params: Sequence[str] = ()) -> LieAlgebraPresentation:
    gens = tuple(F.parse_field(g, vars, params) for g in generators)
    return LieAlgebraPresentation(name, tuple(vars), tuple(params), gens)


@dataclass(frozen=True)
class StructureConstants:
    order: int
    c: tuple  # c[j][k][s] -> Expr in the parameters

    def entry(self, j: int, k: int, s: int) -> E.Expr:
        return self.c[j][k][s]


@dataclass
class IsotropyReport:
    base: tuple
    combinations: list        # rows of constants(params) lambda with sum lambda_k X_k vanishing at base
    vanishing_fields: list    # the corresponding VectorFields
    linear_isotropy: list     # n x n Jacobian matrices at base (Expr entries), dependent ones pruned
    reduced_basis: list       # translations + linear isotropy fields


# ---------------------------------------------------------------------------
# closure and structure constants


def _coefficient_equations(L: LieAlgebraPresentation):
    """Rows of the linear system expressing membership in the constant span:
    one row per (coordinate, variable-monomial), columns the generators."""
    n = L.dim
    keys = []
    key_index = {}
    columns = []
    for g in L.generators:
        col = {}
        for i in range(n):
            for expo, coeff in E.poly_coefficients(g.coeffs[i], n).items():
                k = (i, expo)
                if k not in key_index:
                    key_index[k] = len(keys)
                    keys.append(k)
                col[key_index[k]] = coeff
        columns.append(col)
    return keys, key_index, columns


def _project_to_span(L: LieAlgebraPresentation, B: VectorField, keys, key_index, columns):
    """Solve sum_s c_s X_s = B for constants in the parameters. Returns
    (constants, residual_field)."""
    rhs_entries = {}
    for i in range(L.dim):
        for expo, coeff in E.poly_coefficients(B.coeffs[i], L.dim).items():
            k = (i, expo)
            if k not in key_index:
                # monomial absent from every generator: equation 0 = coeff
                key_index[k] = len(keys)
                keys.append(k)
            rhs_entries[key_index[k]] = coeff
    nrows = len(keys)
    matrix = [[columns[s].get(r, E.ZERO) for s in range(L.order)] for r in range(nrows)]
    rhs = [rhs_entries.get(r, E.ZERO) for r in range(nrows)]
    solution, _consistent = exactla.solve(matrix, rhs, exactla.EXPR_OPS)
    combo = F.zero_field(L.dim)
    for s, cs in enumerate(solution):
        if not cs.is_zero:
            combo = combo + (cs * L.generators[s])
    residual = B - combo
    return solution, residual


def check_closure(L: LieAlgebraPresentation) -> StructureConstants:
    """Solve [X_j, X_k] = sum_s c_jk^s X_s exactly by matching canonical
    variable-monomials; the c must be free of the variables. Raises
    NotClosedError with the offending residual otherwise."""
    keys, key_index, columns = _coefficient_equations(L)
    r = L.order
    table = [[[E.ZERO] * r for _ in range(r)] for _ in range(r)]
    for j in range(r):
        for k in range(j + 1, r):
            B = F.bracket(L.generators[j], L.generators[k])
            constants, residual = _project_to_span(L, B, keys, key_index, columns)
            if not residual.is_zero:
                raise NotClosedError(j, k, residual)
            for s, cs in enumerate(constants):
                table[j][k][s] = cs
                table[k][j][s] = E.neg(cs)
    frozen = tuple(tuple(tuple(row) for row in plane) for plane in table)
    return StructureConstants(r, frozen)


def verify_structure(C: StructureConstants) -> bool:
    """Exact antisymmetry and the quadratic relations
    0 = sum_s (c_kl^s c_js^t + c_jk^s c_ls^t + c_lj^s c_ks^t)."""
    r = C.order
    for j in range(r):
        for k in range(r):
            for s in range(r):
                total = E.add(C.c[j][k][s], C.c[k][j][s])
                if E.is_identically_zero(total) is not E.Zeroness.YES:
                    return False
    for j in range(r):
        for k in range(r):
            for l in range(r):
                for t in range(r):
                    acc = E.ZERO
                    for s in range(r):
                        acc = E.add(acc, E.mul(C.c[k][l][s], C.c[j][s][t]))
                        acc = E.add(acc, E.mul(C.c[j][k][s], C.c[l][s][t]))
                        acc = E.add(acc, E.mul(C.c[l][j][s], C.c[k][s][t]))
                    if E.is_identically_zero(acc) is not E.Zeroness.YES:
                        return False
    return True


# ---------------------------------------------------------------------------
# transitivity, isotropy, reduced algebra


def is_transitive(L: LieAlgebraPresentation, seed: int = 0,
                  param_values=None) -> bool:
    return F.generic_rank(list(L.generators), seed=seed, param_values=param_values) == L.dim


def find_generic_point(L: LieAlgebraPresentation, seed: int = 0, param_values=None):
    """Rational point where the evaluation matrix attains the generic rank."""
    target = F.generic_rank(list(L.generators), seed=seed, param_values=param_values)
    rng = random.Random(seed ^ 0x5EED)
    pidx = F.field_params(list(L.generators))
    candidates = [[Fraction(0)] * L.dim] + [F.sample_point(L.dim, rng) for _ in range(60)]
    for coords in candidates:
        params = dict(param_values or {})
        for j in pidx:
            params.setdefault(j, F.random_nonspecial_rational(rng))
        try:
            matrix = [F.evaluate_exact_at(g, coords, params) for g in L.generators]
        except E.DomainError:
            continue
        if exactla.rank(matrix) == target:
            return coords, params
    raise F.FieldError("no generic point found")


def isotropy_at_point(L: LieAlgebraPresentation, base, param_values=None) -> IsotropyReport:
    """Exact kernel basis of the evaluation map at base: all constant (in the
    parameters) combinations of the generators vanishing there."""
    base_pt = F._as_point(base)
    coords = [Fraction(v) for v in base_pt.coords]
    pv = dict(param_values or {})
    pv.update(base_pt.params)
    pidx = F.field_params(list(L.generators))
    missing = pidx - set(pv)
    if missing:
        # keep parameters symbolic: evaluate coefficients into Expr entries
        matrix = [
            [E.substitute_vars(c, {i: E.const(coords[i]) for i in range(L.dim)}) for c in g.coeffs]
            for g in L.generators
        ]
        kernel = exactla.nullspace(_transpose(matrix), exactla.EXPR_OPS)
        combos = kernel
    else:
        matrix = [F.evaluate_exact_at(g, coords, pv) for g in L.generators]
        kernel = exactla.nullspace(_transpose(matrix), exactla.FRACTION_OPS)
        combos = [[E.const(v) for v in row] for row in kernel]
    vanishing = []
    for row in combos:
        X = F.zero_field(L.dim)
        for s, cs in enumerate(row):
            if not cs.is_zero:
                X = X + (cs * L.generators[s])
        if pv:
            X = VectorField(X.dim, tuple(E.substitute_params(c, pv) for c in X.coeffs))
        vanishing.append(X)
    linear = _linear_isotropy_matrices(vanishing, coords, pv, L.dim)
    reduced = _reduced_basis(linear, L.dim)
    return IsotropyReport(tuple(coords), combos, vanishing, linear, reduced)


def _transpose(matrix):
    return [list(col) for col in zip(*matrix)] if matrix else []


def _linear_isotropy_matrices(vanishing: Sequence[VectorField], coords, param_values, n):
    mats = []
    for X in vanishing:
        J = []
        for nu in range(n):
            row = []
            for tau in range(n):
                d = E.differentiate(X.coeffs[nu], tau)
                d = E.substitute_vars(d, {i: E.const(coords[i]) for i in range(n)})
                if param_values:
                    d = E.substitute_params(d, param_values)
                row.append(d)
            J.append(row)
        mats.append(J)
    # prune linearly dependent matrices (over the parameter field)
    kept = []
    vectors = []
    for J in mats:
        vec = [entry for row in J for entry in row]
        trial = vectors + [vec]
        if exactla.rank(trial, exactla.EXPR_OPS) == len(trial):
            kept.append(J)
            vectors.append(vec)
    return kept


def _reduced_basis(linear_mats, n):
    out = [F.coordinate_field(n, i) for i in range(n)]
    for J in linear_mats:
        coeffs = []
        for nu in range(n):
            acc = E.ZERO
            for mu in range(n):
                if not J[nu][mu].is_zero:
                    acc = E.add(acc, E.mul(J[nu][mu], E.var(mu)))
            coeffs.append(acc)
        out.append(VectorField(n, tuple(coeffs)))
    return out


def linear_isotropy_group(L: LieAlgebraPresentation, base, param_values=None) -> list:
    """Linear parts (Jacobians at base) of an isotropy basis, with dependent
    matrices pruned. Matrix J acts on the primed block by x' -> J x'."""
    return isotropy_at_point(L, base, param_values).linear_isotropy


def reduced_algebra(L: LieAlgebraPresentation, base, param_values=None,
                    verify: bool = True) -> LieAlgebraPresentation:
    """Translations in all directions plus the linear isotropy fields. The
    result is checked to close under bracket."""
    base_pt = F._as_point(base)
    coords = [Fraction(v) for v in base_pt.coords]
    pv = dict(param_values or {})
    pv.update(base_pt.params)
    matrix = []
    try:
        matrix = [F.evaluate_exact_at(g, coords, pv or None) for g in L.generators]
        rank_at_base = exactla.rank(matrix)
    except (E.DomainError, E.ExprError):
        rank_at_base = None
    if rank_at_base is not None and rank_at_base != L.dim:
        raise NotTransitiveAtBase(f"{L.name}: rank {rank_at_base} < {L.dim} at base")
    report = isotropy_at_point(L, base, param_values)
    reduced = LieAlgebraPresentation(f"{L.name}-reduced", L.vars, L.params, tuple(report.reduced_basis))
    if verify:
        check_closure(reduced)
    return reduced


# ---------------------------------------------------------------------------
# joint invariants


def joint_invariant_count(L: LieAlgebraPresentation, s: int, seed: int = 0,
                          param_values=None, sample_log: dict | None = None) -> int:
    """s*dim minus the generic rank of the point-prolonged generators, sampled
    at jointly generic configurations (no two points sharing any coordinate)."""
    if s < 1:
        raise ValueError("s must be >= 1")
    prolonged = [F.prolong_points(g, s) for g in L.generators]
    n = L.dim

    def mutually_generic(coords):
        for a in range(s):
            for b in range(a + 1, s):
                if any(coords[a * n + i] == coords[b * n + i] for i in range(n)):
                    return False
        return True

    rank = F.generic_rank(prolonged, seed=seed, param_values=param_values,
                          point_filter=mutually_generic if s > 1 else None,
                          sample_log=sample_log)
    return s * n - rank


def two_point_invariant_criterion(L: LieAlgebraPresentation, seed: int = 0,
                                  param_values=None) -> bool:
    """For a transitive six-generator algebra in dimension three: the 3x3
    coefficient determinant of an isotropy basis at a generic point vanishes
    identically while some 2x2 minor does not."""
    if L.dim != 3 or L.order != 6:
        raise ValueError("criterion needs six generators in dimension three")
    if not is_transitive(L, seed=seed, param_values=param_values):
        raise ValueError("criterion needs a transitive algebra")
    coords, params = find_generic_point(L, seed=seed, param_values=param_values)
    report = isotropy_at_point(L, F.Point(coords), params)
    if len(report.vanishing_fields) != 3:
        return False
    rows = [list(X.coeffs) for X in report.vanishing_fields]
    det = exactla.det3(rows, E.mul, E.add, E.neg)
    if E.is_identically_zero(det) is not E.Zeroness.YES:
        return False
    for i1 in range(3):
        for i2 in range(i1 + 1, 3):
            for j1 in range(3):
                for j2 in range(j1 + 1, 3):
                    minor = E.add(
                        E.mul(rows[i1][j1], rows[i2][j2]),
                        E.neg(E.mul(rows[i1][j2], rows[i2][j1])),
                    )
                    if E.is_identically_zero(minor) is E.Zeroness.NO:
                        return True
    return False
