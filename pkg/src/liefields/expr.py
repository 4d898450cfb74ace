"""Exact symbolic scalar expressions.

An expression is a finite sum of terms ``coeff * f1^e1 * ... * fk^ek`` with
``coeff`` a ``Fraction`` and each factor one of

* a variable ``x_i`` (index into a caller-supplied coordinate list),
* a parameter ``c_j`` (an essential constant, never differentiated away by
  coordinate derivatives, never sampled as a coordinate),
* a function node ``log/exp/atan/sqrt`` applied to another expression,
* an inverted polynomial block ``(base)^-k`` with a monic primitive base.

Polynomial subtrees are always kept expanded in a canonical sparse form:
like terms combine, zero coefficients vanish, positive integer powers of
sums are multiplied out, and inverted blocks are normalized (content and
leading coefficient extracted) so that syntactically different spellings of
the same rational expression collide on the same keys.
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

LOG, EXP, ATAN, SQRT = range(4)
FN_NAMES = {LOG: "log", EXP: "exp", ATAN: "atan", SQRT: "sqrt"}
FN_KINDS = {name: kind for kind, name in FN_NAMES.items()}

_V, _P, _F, _Q = 0, 1, 2, 3  # factor tags: variable, parameter, function, inverted block


class Zeroness(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class ExprError(Exception):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(ExprError):
    """Numeric evaluation hit log/sqrt out of range or a vanishing denominator."""

    def __init__(self, message: str, culprit=None):
        super().__init__(message)
        self.culprit = culprit


class NonPolynomialError(ExprError):
    pass


def _fkey(factor):
    tag = factor[0]
    if tag == _V:
        return (0, factor[1])
    if tag == _P:
        return (1, factor[1])
    if tag == _F:
        return (2, factor[1], factor[2].skey())
    return (3, 0, factor[1].skey())


def _mkey(mon):
    deg = 0
    vexps = []
    rest = []
    for factor, e in mon:
        if factor[0] == _V:
            deg += e
            vexps.append((factor[1], -e))
        else:
            rest.append((_fkey(factor), -e))
    return (-deg, tuple(vexps), tuple(rest))


class Expr:
    """Immutable canonical expression. Build through the module functions."""

    __slots__ = ("terms", "_hash", "_skey")

    def __init__(self, terms):
        self.terms = terms
        self._hash = hash(terms)
        self._skey = None

    def skey(self):
        if self._skey is None:
            self._skey = tuple(
                (tuple((_fkey(f), e) for f, e in mon), (c.numerator, c.denominator))
                for mon, c in self.terms
            )
        return self._skey

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Expr) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Expr<{generic_str(self)}>"

    # arithmetic sugar; right operands may be ints or Fractions
    def __add__(self, other):
        if not isinstance(other, (Expr, int, Fraction)):
            return NotImplemented
        return add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        if not isinstance(other, (Expr, int, Fraction)):
            return NotImplemented
        return add(self, neg(_coerce(other)))

    def __rsub__(self, other):
        if not isinstance(other, (Expr, int, Fraction)):
            return NotImplemented
        return add(_coerce(other), neg(self))

    def __mul__(self, other):
        if not isinstance(other, (Expr, int, Fraction)):
            return NotImplemented
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k):
        return intpow(self, k)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self):
        """Fraction value if the expression is a constant, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and not self.terms[0][0]:
            return self.terms[0][1]
        return None


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return const(x)
    raise TypeError(f"cannot coerce {x!r} to Expr")


def _make(term_map: dict) -> Expr:
    terms = tuple(
        sorted(((m, c) for m, c in term_map.items() if c != 0), key=lambda t: _mkey(t[0]))
    )
    return Expr(terms)


ZERO = Expr(())
ONE = Expr((((), Fraction(1)),))


def const(q) -> Expr:
    q = Fraction(q)
    if q == 0:
        return ZERO
    return Expr((((), q),))


def var(i: int) -> Expr:
    return Expr((((((_V, i), 1),), Fraction(1)),))


def param(j: int) -> Expr:
    return Expr((((((_P, j), 1),), Fraction(1)),))


def add(a: Expr, b: Expr) -> Expr:
    if not a.terms:
        return b
    if not b.terms:
        return a
    acc = dict(a.terms)
    for m, c in b.terms:
        nc = acc.get(m, Fraction(0)) + c
        if nc:
            acc[m] = nc
        else:
            acc.pop(m, None)
    return _make(acc)


def neg(a: Expr) -> Expr:
    return Expr(tuple((m, -c) for m, c in a.terms))


def _mul_monomials(m1, m2):
    """Combine two monomials; returns (monomial, overflow) where overflow is a
    list of (base_expr, positive_exponent) for inverted blocks whose exponent
    became positive and must be expanded back into polynomial form."""
    exps = dict(m1)
    for f, e in m2:
        ne = exps.get(f, 0) + e
        if ne:
            exps[f] = ne
        else:
            exps.pop(f, None)
    overflow = []
    for f in [f for f, e in exps.items() if f[0] == _Q and e > 0]:
        overflow.append((f[1], exps.pop(f)))
    mon = tuple(sorted(exps.items(), key=lambda fe: _fkey(fe[0])))
    return mon, overflow


def mul(a: Expr, b: Expr) -> Expr:
    if not a.terms or not b.terms:
        return ZERO
    acc: dict = {}
    pending: list = []
    for m1, c1 in a.terms:
        for m2, c2 in b.terms:
            mon, overflow = _mul_monomials(m1, m2)
            c = c1 * c2
            if overflow:
                piece = Expr(((mon, c),))
                for base, e in overflow:
                    piece = mul(piece, intpow(base, e))
                pending.append(piece)
            else:
                nc = acc.get(mon, Fraction(0)) + c
                if nc:
                    acc[mon] = nc
                else:
                    acc.pop(mon, None)
    out = _make(acc)
    for piece in pending:
        out = add(out, piece)
    return out


def intpow(a: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k < 0:
        return intpow(inverse(a), -k)
    if len(a.terms) == 1:
        mon, c = a.terms[0]
        exps = {f: e * k for f, e in mon}
        # inverted blocks keep negative exponents under positive powers
        mon2 = tuple(sorted(exps.items(), key=lambda fe: _fkey(fe[0])))
        return Expr(((mon2, c**k),))
    result = ONE
    base = a
    n = k
    while n:
        if n & 1:
            result = mul(result, base)
        base_needed = n > 1
        n >>= 1
        if base_needed and n:
            base = mul(base, base)
    return result


def _clearing_monomial(e: Expr):
    """Smallest monomial clearing every negative exponent in e."""
    need: dict = {}
    for mon, _ in e.terms:
        for f, ex in mon:
            if ex < 0:
                need[f] = max(need.get(f, 0), -ex)
    mon = tuple(sorted(need.items(), key=lambda fe: _fkey(fe[0])))
    return mon


def clear_denominators(e: Expr) -> Expr:
    """e multiplied by the minimal monomial of its inverted/negative factors."""
    mon = _clearing_monomial(e)
    if not mon:
        return e
    return mul(e, Expr(((mon, Fraction(1)),)))


def inverse(e: Expr) -> Expr:
    if not e.terms:
        raise ZeroDivisionError("inverse of zero expression")
    if len(e.terms) == 1:
        mon, c = e.terms[0]
        exps = {f: -ex for f, ex in mon}
        overflow = [(f[1], exps.pop(f)) for f in list(exps) if f[0] == _Q and exps[f] > 0]
        mon2 = tuple(sorted(exps.items(), key=lambda fe: _fkey(fe[0])))
        out = Expr(((mon2, 1 / c),))
        for base, ex in overflow:
            out = mul(out, intpow(base, ex))
        return out
    numer = clear_denominators(e)
    denom_mon = _clearing_monomial(e)
    if len(numer.terms) == 1:
        inv = inverse(numer)
        if denom_mon:
            inv = mul(inv, Expr(((denom_mon, Fraction(1)),)))
        return inv
    # extract monomial content so the base is primitive
    content: dict = None
    for mon, _ in numer.terms:
        exps = dict(mon)
        if content is None:
            content = exps
        else:
            content = {f: min(e, exps.get(f, 0)) for f, e in content.items() if exps.get(f, 0) > 0}
    content = {f: e for f, e in (content or {}).items() if e > 0}
    if content:
        strip = Expr(((tuple(sorted(((f, -e) for f, e in content.items()), key=lambda fe: _fkey(fe[0]))), Fraction(1)),))
        numer = mul(numer, strip)
    lead = numer.terms[0][1]
    base = Expr(tuple((m, c / lead) for m, c in numer.terms)) if lead != 1 else numer
    parts: dict = {(_Q, base): -1}
    for f, e in content.items():
        parts[f] = parts.get(f, 0) - e
    mon2 = tuple(sorted(parts.items(), key=lambda fe: _fkey(fe[0])))
    out = Expr(((mon2, 1 / lead),))
    if denom_mon:
        out = mul(out, Expr(((denom_mon, Fraction(1)),)))
    return out


def _perfect_sqrt(q: Fraction):
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def fn(kind: int, arg: Expr) -> Expr:
    cv = arg.constant_value()
    if cv is not None:
        if kind == LOG and cv == 1:
            return ZERO
        if kind == EXP and cv == 0:
            return ONE
        if kind == ATAN and cv == 0:
            return ZERO
        if kind == SQRT:
            r = _perfect_sqrt(cv)
            if r is not None:
                return const(r)
    return Expr((((((_F, kind, arg), 1),), Fraction(1)),))


def log(arg: Expr) -> Expr:
    return fn(LOG, arg)


def exp_(arg: Expr) -> Expr:
    return fn(EXP, arg)


def atan(arg: Expr) -> Expr:
    return fn(ATAN, arg)


def sqrt(arg: Expr) -> Expr:
    return fn(SQRT, arg)


# ---------------------------------------------------------------------------
# calculus


def _dfactor(factor, v: int) -> Expr:
    tag = factor[0]
    if tag == _V:
        return ONE if factor[1] == v else ZERO
    if tag == _P:
        return ZERO
    if tag == _F:
        kind, arg = factor[1], factor[2]
        du = differentiate(arg, v)
        if du.is_zero:
            return ZERO
        if kind == LOG:
            return mul(du, inverse(arg))
        if kind == EXP:
            return mul(du, fn(EXP, arg))
        if kind == ATAN:
            return mul(du, inverse(add(ONE, mul(arg, arg))))
        # sqrt: u' / (2 sqrt(u))
        root = Expr((((((_F, SQRT, arg), -1),), Fraction(1, 2)),))
        return mul(du, root)
    return differentiate(factor[1], v)  # inverted block: derivative of the base


@lru_cache(maxsize=200000)
def differentiate(e: Expr, v: int) -> Expr:
    out = ZERO
    for mon, c in e.terms:
        for idx, (factor, ex) in enumerate(mon):
            df = _dfactor(factor, v)
            if df.is_zero:
                continue
            rest = {f: k for f, k in mon}
            if ex == 1:
                del rest[factor]
            else:
                rest[factor] = ex - 1
            overflow = [(f[1], rest.pop(f)) for f in list(rest) if f[0] == _Q and rest[f] > 0]
            mon2 = tuple(sorted(rest.items(), key=lambda fe: _fkey(fe[0])))
            piece = mul(Expr(((mon2, c * ex),)), df)
            for base, k in overflow:
                piece = mul(piece, intpow(base, k))
            out = add(out, piece)
    return out


def substitute_vars(e: Expr, mapping: Mapping[int, Expr]) -> Expr:
    out = ZERO
    for mon, c in e.terms:
        piece = const(c)
        for factor, ex in mon:
            tag = factor[0]
            if tag == _V and factor[1] in mapping:
                rep = mapping[factor[1]]
            elif tag == _F:
                rep = fn(factor[1], substitute_vars(factor[2], mapping))
            elif tag == _Q:
                rep = substitute_vars(factor[1], mapping)
                rep = intpow(rep, ex)
                piece = mul(piece, rep)
                continue
            else:
                piece = mul(piece, Expr(((((factor, ex),), Fraction(1)),)))
                continue
            piece = mul(piece, intpow(rep, ex))
        out = add(out, piece)
    return out


def substitute_params(e: Expr, mapping: Mapping[int, "Expr | Fraction | int"]) -> Expr:
    out = ZERO
    for mon, c in e.terms:
        piece = const(c)
        for factor, ex in mon:
            tag = factor[0]
            if tag == _P and factor[1] in mapping:
                rep = _coerce(mapping[factor[1]])
            elif tag == _F:
                rep = fn(factor[1], substitute_params(factor[2], mapping))
            elif tag == _Q:
                rep = substitute_params(factor[1], mapping)
            else:
                piece = mul(piece, Expr(((((factor, ex),), Fraction(1)),)))
                continue
            piece = mul(piece, intpow(rep, ex))
        out = add(out, piece)
    return out


# ---------------------------------------------------------------------------
# structure queries


def domain_guards(e: Expr) -> list:
    """Subexpressions that must keep a fixed sign for e to stay inside one
    continuity domain: inverted-block bases and log/sqrt arguments, collected
    recursively (an atan's poles are the inverted blocks of its argument)."""
    out = []
    seen = set()

    def visit(ex: Expr):
        for mon, _ in ex.terms:
            for factor, exp in mon:
                tag = factor[0]
                if tag == _Q:
                    if factor[1] not in seen:
                        seen.add(factor[1])
                        out.append(factor[1])
                    visit(factor[1])
                elif tag == _F:
                    if factor[1] in (LOG, SQRT) and factor[2] not in seen:
                        seen.add(factor[2])
                        out.append(factor[2])
                    visit(factor[2])
                elif tag == _V and exp < 0:
                    v = var(factor[1])
                    if v not in seen:
                        seen.add(v)
                        out.append(v)
    visit(e)
    return out


def contains_fn(e: Expr) -> bool:
    for mon, _ in e.terms:
        for factor, _ex in mon:
            if factor[0] == _F:
                return True
            if factor[0] == _Q and contains_fn(factor[1]):
                return True
    return False


def is_polynomial(e: Expr) -> bool:
    for mon, _ in e.terms:
        for factor, ex in mon:
            if factor[0] in (_F, _Q):
                return False
            if ex < 0:
                return False
    return True


def used_vars(e: Expr) -> set:
    out = set()
    for mon, _ in e.terms:
        for factor, _ex in mon:
            if factor[0] == _V:
                out.add(factor[1])
            elif factor[0] == _F:
                out |= used_vars(factor[2])
            elif factor[0] == _Q:
                out |= used_vars(factor[1])
    return out


def used_params(e: Expr) -> set:
    out = set()
    for mon, _ in e.terms:
        for factor, _ex in mon:
            if factor[0] == _P:
                out.add(factor[1])
            elif factor[0] == _F:
                out |= used_params(factor[2])
            elif factor[0] == _Q:
                out |= used_params(factor[1])
    return out


def poly_degree(e: Expr) -> int:
    """Total degree in the variables; polynomial expressions only."""
    if not is_polynomial(e):
        raise NonPolynomialError("degree of non-polynomial expression")
    deg = 0
    for mon, _ in e.terms:
        deg = max(deg, sum(ex for f, ex in mon if f[0] == _V))
    return deg


def poly_coefficients(e: Expr, nvars: int) -> dict:
    """Map variable-exponent tuples -> coefficient Expr in the parameters.

    Requires an expression polynomial in the variables (parameters may appear
    in inverted blocks as long as no variable does).
    """
    out: dict = {}
    for mon, c in e.terms:
        vexp = [0] * nvars
        restmon = []
        for factor, ex in mon:
            if factor[0] == _V:
                if ex < 0:
                    raise NonPolynomialError("negative variable power")
                vexp[factor[1]] += ex
            else:
                if factor[0] == _F and used_vars(fn(factor[1], factor[2])):
                    raise NonPolynomialError("function node involving variables")
                if factor[0] == _Q and used_vars(factor[1]):
                    raise NonPolynomialError("inverted block involving variables")
                restmon.append((factor, ex))
        key = tuple(vexp)
        piece = Expr(((tuple(restmon), c),))
        out[key] = add(out.get(key, ZERO), piece)
    return {k: v for k, v in out.items() if not v.is_zero}


# ---------------------------------------------------------------------------
# zero test

_ZT_SAMPLES = 64
_ZT_TOL = 1e-10


def is_identically_zero(e: Expr, seed: int = 0) -> Zeroness:
    """Tri-state zero test.

    YES when polynomial cancellation (after clearing denominators, treating
    function nodes as opaque symbols) leaves nothing. For expressions free of
    function nodes that is a complete decision, so the answer is NO otherwise.
    When function nodes survive, 64 random rational evaluations all vanishing
    gives UNKNOWN; a nonvanishing sample gives NO.
    """
    cleared = clear_denominators(e)
    if cleared.is_zero:
        return Zeroness.YES
    if not contains_fn(e):
        return Zeroness.NO
    import random as _random

    rng = _random.Random(seed)

    def rational():
        return Fraction(rng.randint(-97, 97), rng.randint(1, 97))

    vs = used_vars(e)
    ps = used_params(e)
    hits = 0
    attempts = 0
    while hits < _ZT_SAMPLES and attempts < _ZT_SAMPLES * 20:
        attempts += 1
        coords = {i: float(rational()) for i in vs}
        pars = {j: float(rational()) for j in ps}
        try:
            value = evaluate_numeric(e, _DictPoint(coords), pars)
        except (DomainError, OverflowError):
            continue
        if abs(value) >= _ZT_TOL:
            return Zeroness.NO
        hits += 1
    return Zeroness.UNKNOWN


class _DictPoint:
    """Sparse coordinate access used by the zero-test sampler."""

    def __init__(self, d):
        self.d = d

    def __getitem__(self, i):
        return self.d.get(i, 0.0)


# ---------------------------------------------------------------------------
# evaluation


def evaluate_numeric(e: Expr, coords, params: Mapping[int, float] | None = None) -> float:
    params = params or {}
    total = 0.0
    for mon, c in e.terms:
        value = float(c)
        for factor, ex in mon:
            tag = factor[0]
            if tag == _V:
                base = float(coords[factor[1]])
            elif tag == _P:
                if factor[1] not in params:
                    raise ExprError(f"missing value for parameter #{factor[1]}")
                base = float(params[factor[1]])
            elif tag == _F:
                a = evaluate_numeric(factor[2], coords, params)
                kind = factor[1]
                if kind == LOG:
                    if a <= 0.0:
                        raise DomainError("log of non-positive argument", fn(LOG, factor[2]))
                    base = math.log(a)
                elif kind == EXP:
                    try:
                        base = math.exp(a)
                    except OverflowError as err:
                        raise DomainError("exp overflow", fn(EXP, factor[2])) from err
                elif kind == ATAN:
                    base = math.atan(a)
                else:
                    if a < 0.0:
                        raise DomainError("sqrt of negative argument", fn(SQRT, factor[2]))
                    base = math.sqrt(a)
            else:
                base = evaluate_numeric(factor[1], coords, params)
            if ex < 0 and base == 0.0:
                culprit = factor[1] if tag == _Q else var(factor[1]) if tag == _V else None
                raise DomainError("division by zero", culprit)
            value *= base**ex
        total += value
    return total


def evaluate_exact(e: Expr, coords: Sequence[Fraction], params: Mapping[int, Fraction] | None = None) -> Fraction:
    params = params or {}
    total = Fraction(0)
    for mon, c in e.terms:
        value = c
        for factor, ex in mon:
            tag = factor[0]
            if tag == _V:
                base = Fraction(coords[factor[1]])
            elif tag == _P:
                if factor[1] not in params:
                    raise ExprError(f"missing value for parameter #{factor[1]}")
                base = Fraction(params[factor[1]])
            elif tag == _F:
                raise NonPolynomialError("exact evaluation of function node")
            else:
                base = evaluate_exact(factor[1], coords, params)
            if ex < 0 and base == 0:
                raise DomainError("division by zero", factor[1] if tag == _Q else None)
            value *= base**ex
        total += value
    return total


def compile_numeric(e: Expr) -> Callable:
    """Compile to a fast float evaluator ``f(coords, params) -> float``.

    Domain problems surface as DomainError without the precise culprit; the
    interpreting evaluator stays the reference for error reporting.
    """
    ctx = {"math": math}

    def emit(ex: Expr) -> str:
        parts = []
        for mon, c in ex.terms:
            bits = [repr(float(c))]
            for factor, k in mon:
                tag = factor[0]
                if tag == _V:
                    b = f"X[{factor[1]}]"
                elif tag == _P:
                    b = f"P[{factor[1]}]"
                elif tag == _F:
                    inner = emit(factor[2])
                    fname = {LOG: "math.log", EXP: "math.exp", ATAN: "math.atan", SQRT: "math.sqrt"}[factor[1]]
                    b = f"{fname}({inner})"
                else:
                    b = f"({emit(factor[1])})"
                if k == 1:
                    bits.append(b)
                else:
                    bits.append(f"({b})**{k}")
            parts.append("*".join(bits))
        return "(" + " + ".join(parts) + ")" if parts else "0.0"

    src = "def _f(X, P):\n    return " + emit(e)
    exec(src, ctx)
    raw = ctx["_f"]

    def wrapped(coords, params=None):
        try:
            return raw(coords, params or {})
        except (ValueError, ZeroDivisionError, OverflowError) as err:
            raise DomainError(f"numeric evaluation failed: {err}", e) from err

    return wrapped


# ---------------------------------------------------------------------------
# Taylor expansion (polynomial and inverted-block expressions)


def taylor_coefficients(e: Expr, base: Sequence[Fraction], max_degree: int, nvars: int,
                        params: Mapping[int, Fraction] | None = None) -> dict:
    """Exponent-tuple -> Fraction coefficients of e(base + h) up to |h|-degree
    max_degree. Parameters must be instantiated. Function nodes unsupported."""
    params = dict(params or {})
    shifted = substitute_params(e, params) if params else e
    if used_params(shifted):
        raise ExprError("taylor expansion requires parameter values")
    mapping = {i: add(const(Fraction(base[i])), var(i)) for i in range(nvars)}
    shifted = substitute_vars(shifted, mapping)
    series = _poly_series(shifted, max_degree, nvars)
    return series


def _series_mul(a: dict, b: dict, max_degree: int, nvars: int) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        da = sum(ka)
        for kb, cb in b.items():
            if da + sum(kb) > max_degree:
                continue
            key = tuple(x + y for x, y in zip(ka, kb))
            nc = out.get(key, Fraction(0)) + ca * cb
            if nc:
                out[key] = nc
            else:
                out.pop(key, None)
    return out


def _series_inv(a: dict, max_degree: int, nvars: int) -> dict:
    zero_key = (0,) * nvars
    c0 = a.get(zero_key, Fraction(0))
    if c0 == 0:
        raise DomainError("inverted block singular at expansion point", None)
    rest = {k: v for k, v in a.items() if k != zero_key}
    inv = {zero_key: 1 / c0}
    # Newton-style accumulation: inv = (1/c0) * sum_k (-rest/c0)^k
    term = {zero_key: Fraction(1)}
    scaled_rest = {k: -v / c0 for k, v in rest.items()}
    for _ in range(max_degree):
        term = _series_mul(term, scaled_rest, max_degree, nvars)
        if not term:
            break
        for k, v in term.items():
            nc = inv.get(k, Fraction(0)) + v / c0
            if nc:
                inv[k] = nc
            else:
                inv.pop(k, None)
    return inv


def _poly_series(e: Expr, max_degree: int, nvars: int) -> dict:
    zero_key = (0,) * nvars
    out: dict = {}
    for mon, c in e.terms:
        piece = {zero_key: Fraction(c)}
        for factor, ex in mon:
            tag = factor[0]
            if tag == _V:
                unit = {tuple(1 if i == factor[1] else 0 for i in range(nvars)): Fraction(1)}
                fs = unit
            elif tag == _Q:
                fs = _poly_series(factor[1], max_degree, nvars)
            elif tag == _P:
                raise ExprError("parameters must be instantiated before expansion")
            else:
                raise NonPolynomialError("function node in polynomial expansion")
            if ex < 0:
                fs = _series_inv(fs, max_degree, nvars)
                ex = -ex
            for _ in range(ex):
                piece = _series_mul(piece, fs, max_degree, nvars)
        for k, v in piece.items():
            nc = out.get(k, Fraction(0)) + v
            if nc:
                out[k] = nc
            else:
                out.pop(k, None)
    return out


# ---------------------------------------------------------------------------
# parsing and printing


def parse_expression(text: str, vars: Sequence[str], params: Sequence[str] = ()) -> Expr:
    """Parse per the grammar:

    expr := ['-'] term (('+'|'-') term)* ;  term := factor ('*' factor)* ;
    factor := atom ('^' integer)? ;  atom := number | ident | '(' expr ')'
    | fn '(' expr ')' ;  fn in {log, exp, atan, sqrt} ;
    number := integer ('/' positive-integer)?.
    """
    vmap = {name: i for i, name in enumerate(vars)}
    pmap = {name: j for j, name in enumerate(params)}
    return _Parser(text, vmap, pmap).parse()


class _Parser:
    def __init__(self, text: str, vmap, pmap):
        self.text = text
        self.i = 0
        self.vmap = vmap
        self.pmap = pmap

    def _offset(self) -> int:
        return len(self.text[: self.i].encode("utf-8"))

    def error(self, message: str):
        raise ParseError(message, self._offset())

    def skip_ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def parse(self) -> Expr:
        e = self.expr()
        self.skip_ws()
        if self.i != len(self.text):
            self.error(f"unexpected character {self.text[self.i]!r}")
        return e

    def expr(self) -> Expr:
        negate = False
        if self.peek() == "-":
            self.i += 1
            negate = True
        e = self.term()
        if negate:
            e = neg(e)
        while True:
            c = self.peek()
            if c == "+":
                self.i += 1
                e = add(e, self.term())
            elif c == "-":
                self.i += 1
                e = add(e, neg(self.term()))
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek() == "*":
            self.i += 1
            e = mul(e, self.factor())
        return e

    def factor(self) -> Expr:
        a = self.atom()
        if self.peek() == "^":
            self.i += 1
            k = self.signed_integer()
            a = intpow(a, k)
        return a

    def signed_integer(self) -> int:
        self.skip_ws()
        start = self.i
        if self.i < len(self.text) and self.text[self.i] == "-":
            self.i += 1
        digits = self.i
        while self.i < len(self.text) and self.text[self.i].isdigit():
            self.i += 1
        if self.i == digits:
            self.error("expected integer exponent")
        return int(self.text[start : self.i])

    def atom(self) -> Expr:
        c = self.peek()
        if c == "(":
            self.i += 1
            e = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return e
        if c.isdigit():
            return self.number()
        if c.isalpha() or c == "_":
            name = self.ident()
            if name in FN_KINDS and self.peek() == "(":
                self.i += 1
                arg = self.expr()
                if self.peek() != ")":
                    self.error("expected ')'")
                self.i += 1
                return fn(FN_KINDS[name], arg)
            if name in self.vmap:
                return var(self.vmap[name])
            if name in self.pmap:
                return param(self.pmap[name])
            self.error(f"unknown identifier {name!r}")
        self.error("expected a number, identifier or '('")

    def ident(self) -> str:
        self.skip_ws()
        start = self.i
        while self.i < len(self.text) and (self.text[self.i].isalnum() or self.text[self.i] == "_"):
            self.i += 1
        return self.text[start : self.i]

    def number(self) -> Expr:
        self.skip_ws()
        start = self.i
        while self.i < len(self.text) and self.text[self.i].isdigit():
            self.i += 1
        numerator = int(self.text[start : self.i])
        save = self.i
        self.skip_ws()
        if self.i < len(self.text) and self.text[self.i] == "/":
            self.i += 1
            self.skip_ws()
            dstart = self.i
            while self.i < len(self.text) and self.text[self.i].isdigit():
                self.i += 1
            if self.i == dstart:
                self.error("expected positive integer denominator")
            return const(Fraction(numerator, int(self.text[dstart : self.i])))
        self.i = save
        return const(Fraction(numerator))


def to_string(e: Expr, vars: Sequence[str], params: Sequence[str] = ()) -> str:
    if not e.terms:
        return "0"

    def fmt_factor(factor, ex):
        tag = factor[0]
        if tag == _V:
            s = vars[factor[1]]
        elif tag == _P:
            s = params[factor[1]]
        elif tag == _F:
            s = f"{FN_NAMES[factor[1]]}({to_string(factor[2], vars, params)})"
        else:
            s = f"({to_string(factor[1], vars, params)})"
        return s if ex == 1 else f"{s}^{ex}"

    parts = []
    for mon, c in e.terms:
        bits = [fmt_factor(f, ex) for f, ex in mon]
        mag = abs(c)
        if mag != 1 or not bits:
            bits.insert(0, str(mag))
        parts.append((c < 0, "*".join(bits)))
    out = []
    for idx, (negative, body) in enumerate(parts):
        if idx == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


def generic_str(e: Expr) -> str:
    """Debug rendering with positional names x0,x1,... / c0,c1,..."""
    n = max(used_vars(e), default=-1) + 1
    p = max(used_params(e), default=-1) + 1
    return to_string(e, [f"x{i}" for i in range(n)], [f"c{j}" for j in range(p)])
