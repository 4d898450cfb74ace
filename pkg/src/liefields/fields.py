"""Vector fields as first-order derivations: bracket, application, rank,
truncation and the three prolongations (point tuples, first jets,
differentials)."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import exactla, expr as E


class FieldError(Exception):
    pass


@dataclass(frozen=True)
class Point:
    """Evaluation point: coordinates plus values for the parameters."""

    coords: tuple
    params: Mapping[int, object] = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "params", dict(self.params or {}))


def _as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    return Point(tuple(p))


@dataclass(frozen=True)
class VectorField:
    dim: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.dim:
            raise FieldError(f"expected {self.dim} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.dim != self.dim:
            raise FieldError("dimension mismatch")
        return VectorField(self.dim, tuple(E.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, scalar) -> "VectorField":
        s = scalar if isinstance(scalar, E.Expr) else E.const(scalar)
        return VectorField(self.dim, tuple(E.mul(s, c) for c in self.coeffs))

    def __neg__(self) -> "VectorField":
        return VectorField(self.dim, tuple(E.neg(c) for c in self.coeffs))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def is_polynomial(self) -> bool:
        return all(E.is_polynomial(c) for c in self.coeffs)

    def compiled(self):
        return tuple(E.compile_numeric(c) for c in self.coeffs)


def zero_field(dim: int) -> VectorField:
    return VectorField(dim, tuple(E.ZERO for _ in range(dim)))


def coordinate_field(dim: int, i: int) -> VectorField:
    return VectorField(dim, tuple(E.ONE if j == i else E.ZERO for j in range(dim)))


def apply_to_function(X: VectorField, f: E.Expr) -> E.Expr:
    out = E.ZERO
    for i, xi in enumerate(X.coeffs):
        if xi.is_zero:
            continue
        df = E.differentiate(f, i)
        if not df.is_zero:
            out = E.add(out, E.mul(xi, df))
    return out


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    if X.dim != Y.dim:
        raise FieldError("dimension mismatch in bracket")
    coeffs = tuple(
        E.add(apply_to_function(X, Y.coeffs[i]), E.neg(apply_to_function(Y, X.coeffs[i])))
        for i in range(X.dim)
    )
    return VectorField(X.dim, coeffs)


def evaluate_at_point(X: VectorField, p) -> tuple:
    p = _as_point(p)
    params = {k: float(v) for k, v in p.params.items()}
    return tuple(E.evaluate_numeric(c, [float(v) for v in p.coords], params) for c in X.coeffs)


def evaluate_exact_at(X: VectorField, coords: Sequence[Fraction], params=None) -> list:
    return [E.evaluate_exact(c, coords, params) for c in X.coeffs]


# ---------------------------------------------------------------------------
# random rational sampling

_SPAN = 97


def random_rational(rng: random.Random) -> Fraction:
    num = rng.randint(-_SPAN, _SPAN)
    den = rng.randint(1, _SPAN)
    return Fraction(num, den)


def random_nonspecial_rational(rng: random.Random) -> Fraction:
    while True:
        q = random_rational(rng)
        if q not in (0, 1, -1):
            return q


def sample_params(param_indices: Iterable[int], rng: random.Random) -> dict:
    return {j: random_nonspecial_rational(rng) for j in param_indices}


def field_params(fields: Sequence[VectorField]) -> set:
    out = set()
    for f in fields:
        for c in f.coeffs:
            out |= E.used_params(c)
    return out


def sample_point(dim: int, rng: random.Random):
    return [random_rational(rng) for _ in range(dim)]


# ---------------------------------------------------------------------------
# ranks


def generic_rank(fields: Sequence[VectorField], seed: int = 0, points: int = 8,
                 param_values: Mapping[int, Fraction] | None = None,
                 point_filter=None, sample_log: dict | None = None) -> int:
    """Maximum exact rank of the coefficient matrix over `points` random
    rational points. Parameters are sampled as random non-special rationals
    unless pinned through param_values. Deterministic for a given seed."""
    if not fields:
        raise FieldError("generic_rank of empty field list")
    dim = fields[0].dim
    if any(f.dim != dim for f in fields):
        raise FieldError("mixed dimensions")
    rng = random.Random(seed)
    pidx = field_params(fields)
    best = 0
    found = 0
    attempts = 0
    while found < points and attempts < 200 * points:
        attempts += 1
        coords = sample_point(dim, rng)
        if point_filter is not None and not point_filter(coords):
            if sample_log is not None:
                sample_log["rejected"] = sample_log.get("rejected", 0) + 1
            continue
        params = dict(param_values or {})
        for j in pidx:
            params.setdefault(j, random_nonspecial_rational(rng))
        try:
            matrix = [evaluate_exact_at(f, coords, params) for f in fields]
        except E.DomainError:
            if sample_log is not None:
                sample_log["rejected"] = sample_log.get("rejected", 0) + 1
            continue
        found += 1
        best = max(best, exactla.rank(matrix))
        if best == min(len(fields), dim):
            break
    if found == 0:
        raise FieldError("could not sample any admissible point")
    return best


def linear_independence_over_constants(fields: Sequence[VectorField], max_degree: int = 4,
                                       seed: int = 0) -> bool:
    """True iff no nonzero constant combination of the fields vanishes, decided
    on the matrix of Taylor coefficients up to max_degree (base shifted off the
    origin when a coefficient is singular there)."""
    if not fields:
        return True
    dim = fields[0].dim
    rng = random.Random(seed)
    pidx = field_params(fields)
    params = sample_params(pidx, rng)
    base = [Fraction(0)] * dim
    for _ in range(50):
        try:
            rows = []
            for f in fields:
                row_entries = {}
                for i, c in enumerate(f.coeffs):
                    coeffs = E.taylor_coefficients(c, base, max_degree, dim, params)
                    for expo, val in coeffs.items():
                        row_entries[(i, expo)] = val
                rows.append(row_entries)
            keys = sorted({k for row in rows for k in row})
            matrix = [[row.get(k, Fraction(0)) for k in keys] for row in rows]
            return exactla.rank(matrix) == len(fields)
        except E.DomainError:
            base = sample_point(dim, rng)
    raise FieldError("no admissible expansion point found")


# ---------------------------------------------------------------------------
# truncation and prolongations


def truncate_to_linear(X: VectorField, base) -> VectorField:
    """Taylor-expand each coefficient at base and keep the constant and linear
    parts, re-expressed in the original coordinates. Parameters stay symbolic."""
    base = _as_point(base)
    coords = [Fraction(v) for v in base.coords]
    shift = {i: E.add(E.const(coords[i]), E.var(i)) for i in range(X.dim)}
    out = []
    for c in X.coeffs:
        if not E.is_polynomial(c):
            raise E.NonPolynomialError("truncate_to_linear needs polynomial coefficients")
        shifted = E.substitute_vars(c, shift)
        acc = E.ZERO
        for expo, val in E.poly_coefficients(shifted, X.dim).items():
            if sum(expo) > 1:
                continue
            piece = val
            for i, e in enumerate(expo):
                if e:
                    piece = E.mul(piece, E.add(E.var(i), E.const(-coords[i])))
            acc = E.add(acc, piece)
        out.append(acc)
    return VectorField(X.dim, tuple(out))


def prolong_points(X: VectorField, s: int) -> VectorField:
    """Copy the field onto each of s point blocks: dim becomes s*dim."""
    if s < 1:
        raise FieldError("s must be >= 1")
    n = X.dim
    coeffs = []
    for block in range(s):
        shift = {j: E.var(block * n + j) for j in range(n)}
        for i in range(n):
            coeffs.append(E.substitute_vars(X.coeffs[i], shift))
    return VectorField(s * n, tuple(coeffs))


def prolong_jet1(X: VectorField) -> VectorField:
    """Planar field lifted to (x, y, z) with z the slope dy/dx:
    third coefficient eta_x + (eta_y - xi_x) z - xi_y z^2."""
    if X.dim != 2:
        raise FieldError("prolong_jet1 needs a planar field")
    xi, eta = X.coeffs
    z = E.var(2)
    third = E.add(
        E.differentiate(eta, 0),
        E.add(
            E.mul(E.add(E.differentiate(eta, 1), E.neg(E.differentiate(xi, 0))), z),
            E.neg(E.mul(E.differentiate(xi, 1), E.mul(z, z))),
        ),
    )
    return VectorField(3, (xi, eta, third))


def prolong_differentials(X: VectorField) -> VectorField:
    """Field plus its linearized action on a primed block: on 2n variables
    (x, x'), the primed coefficient nu is sum_tau d(xi_nu)/d(x_tau) * x'_tau."""
    n = X.dim
    coeffs = list(X.coeffs)
    for nu in range(n):
        acc = E.ZERO
        for tau in range(n):
            d = E.differentiate(X.coeffs[nu], tau)
            if not d.is_zero:
                acc = E.add(acc, E.mul(d, E.var(n + tau)))
        coeffs.append(acc)
    return VectorField(2 * n, tuple(coeffs))


# ---------------------------------------------------------------------------
# span comparisons (polynomial fields)


def _span_matrix(fields: Sequence[VectorField]):
    keys = set()
    rows = []
    for f in fields:
        row = {}
        for i, c in enumerate(f.coeffs):
            for expo, val in E.poly_coefficients(c, f.dim).items():
                cv = val.constant_value()
                if cv is None:
                    raise FieldError("span comparison needs parameter-free fields")
                row[(i, expo)] = cv
        keys |= set(row)
        rows.append(row)
    keys = sorted(keys)
    return [[row.get(k, Fraction(0)) for k in keys] for row in rows], keys


def span_equal(a: Sequence[VectorField], b: Sequence[VectorField]) -> bool:
    """Exact equality of constant-coefficient spans of polynomial fields."""
    both, _ = _span_matrix(list(a) + list(b))
    ra = exactla.rank(both[: len(a)])
    rb = exactla.rank(both[len(a):])
    rab = exactla.rank(both)
    return ra == rb == rab


def in_span(f: VectorField, basis: Sequence[VectorField]) -> bool:
    both, _ = _span_matrix(list(basis) + [f])
    return exactla.rank(both) == exactla.rank(both[: len(basis)])


# ---------------------------------------------------------------------------
# parsing and printing of field literals


def basis_tokens(dim: int) -> list:
    if dim <= 3:
        return ["p", "q", "r"][:dim]
    return [f"d{i + 1}" for i in range(dim)]


def _replace_idents(text: str, mapping: dict) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tok = text[i:j]
            out.append(mapping.get(tok, tok))
            i = j
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def parse_field(text: str, vars: Sequence[str], params: Sequence[str] = ()) -> VectorField:
    """Parse a field literal such as "x^2*p + 2*x*r" or "y*d1 - x*d2": an
    expression over the variables extended by one basis token per coordinate,
    linear homogeneous in the tokens. Both the p/q/r shorthand (dims <= 3) and
    the positional d1..dn spelling are accepted."""
    dim = len(vars)
    tokens = basis_tokens(dim)
    aliases = [f"d{i + 1}" for i in range(dim)]
    clash = (set(tokens) | set(aliases)) & (set(vars) | set(params))
    if clash:
        raise FieldError(f"variable names collide with basis tokens: {sorted(clash)}")
    ext_vars = list(vars) + tokens
    if aliases != tokens:
        text = _replace_idents(text, dict(zip(aliases, tokens)))
    e = E.parse_expression(text, ext_vars, params)
    coeffs = [E.ZERO] * dim
    for mon, c in e.terms:
        token_index = None
        stripped = []
        for factor, ex in mon:
            if factor[0] == E._V and factor[1] >= dim:
                if token_index is not None or ex != 1:
                    raise FieldError(f"field literal not linear in basis tokens: {text!r}")
                token_index = factor[1] - dim
            else:
                stripped.append((factor, ex))
        if token_index is None:
            raise FieldError(f"term without basis token in field literal: {text!r}")
        piece = E.Expr(((tuple(stripped), c),))
        if E.used_vars(piece) and max(E.used_vars(piece)) >= dim:
            raise FieldError("basis token nested inside a function node")
        coeffs[token_index] = E.add(coeffs[token_index], piece)
    return VectorField(dim, tuple(coeffs))


def field_to_string(X: VectorField, vars: Sequence[str], params: Sequence[str] = ()) -> str:
    tokens = basis_tokens(X.dim)
    parts = []
    for i, c in enumerate(X.coeffs):
        if c.is_zero:
            continue
        cv = c.constant_value()
        if cv == 1:
            body = tokens[i]
            negative = False
        elif cv == -1:
            body = tokens[i]
            negative = True
        elif len(c.terms) == 1:
            s = E.to_string(c, vars, params)
            negative = s.startswith("-")
            body = f"{s.lstrip('-')}*{tokens[i]}"
        else:
            s = E.to_string(c, vars, params)
            negative = False
            body = f"({s})*{tokens[i]}"
        parts.append((negative, body))
    if not parts:
        return "0"
    out = []
    for idx, (negative, body) in enumerate(parts):
        if idx == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


def point_var_names(vars: Sequence[str], s: int) -> list:
    """Names for the s-fold point prolongation: x1, y1, ..., x2, y2, ..."""
    return [f"{v}{k + 1}" for k in range(s) for v in vars]


def differential_var_names(vars: Sequence[str]) -> list:
    return list(vars) + [f"d{v}" for v in vars]
