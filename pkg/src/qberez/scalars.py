"""Exact scalar arithmetic for the whole toolkit.

Everything downstream (operators, L-matrices, identity checks) lives over
the field of rational functions in the quantum parameter ``q`` and a finite
set of named spectral symbols (``z``, ``w``, ``x``, evaluation parameters,
the formal central power ``qc``).  Values are fractions of sparse
integer-coefficient polynomials kept in a canonical reduced form, so
equality is a structural comparison and every identity check is exact.

Negative powers of ``q`` are represented through the denominator, e.g.
``q^-1`` is ``Rat(1, q)``; the canonical text rendering folds monomial
denominators back into Laurent form ("q^2 - q^-2").
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd


class ScalarError(ArithmeticError):
    pass


class DivisionByZero(ScalarError):
    """Division by an exact zero; carries the offending operand."""

    def __init__(self, operand):
        self.operand = operand
        super().__init__(f"division by zero (operand {operand!r})")


class FSeriesUnsolvable(ScalarError):
    """The normalizing-series functional equation has no solution."""


# ---------------------------------------------------------------------------
# sparse multivariate polynomials over the integers


class Poly:
    """Sparse polynomial with int coefficients in named symbols.

    ``vars`` is a sorted tuple of symbol names and ``terms`` maps exponent
    tuples (aligned with ``vars``) to nonzero int coefficients.  Unused
    symbols are pruned so equal polynomials compare equal structurally.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars=(), terms=None, _normalized=False):
        if terms is None:
            terms = {}
        if not _normalized:
            terms = {e: c for e, c in terms.items() if c}
            if terms and vars:
                used = [i for i in range(len(vars)) if any(e[i] for e in terms)]
                if len(used) != len(vars):
                    vars = tuple(vars[i] for i in used)
                    terms = {tuple(e[i] for i in used): c for e, c in terms.items()}
            elif not terms:
                vars = ()
        self.vars = tuple(vars)
        self.terms = terms
        self._hash = None

    # -- constructors

    @staticmethod
    def const(c):
        c = int(c)
        return Poly((), {(): c} if c else {}, _normalized=True)

    @staticmethod
    def sym(name, exp=1):
        if exp == 0:
            return Poly.const(1)
        if exp < 0:
            raise ValueError("Poly exponents must be nonnegative; use Rat for inverses")
        return Poly((name,), {(exp,): 1}, _normalized=True)

    # -- basic predicates

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_const(self):
        return not self.vars

    @property
    def is_term(self):
        return len(self.terms) <= 1

    def const_value(self):
        if self.vars:
            raise ValueError("not a constant")
        return self.terms.get((), 0)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({render_poly(self)!r})"

    # -- alignment of two polynomials onto a common symbol tuple

    def _aligned(self, other):
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        vars = tuple(sorted(set(self.vars) | set(other.vars)))
        return vars, _remap(self, vars), _remap(other, vars)

    # -- arithmetic

    def __add__(self, other):
        vars, ta, tb = self._aligned(other)
        out = dict(ta)
        for e, c in tb.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Poly(vars, out)

    def __sub__(self, other):
        vars, ta, tb = self._aligned(other)
        out = dict(ta)
        for e, c in tb.items():
            s = out.get(e, 0) - c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Poly(vars, out)

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()}, _normalized=True)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return _P_ZERO
            return Poly(self.vars, {e: c * other for e, c in self.terms.items()}, _normalized=True)
        if self.is_zero or other.is_zero:
            return _P_ZERO
        vars, ta, tb = self._aligned(other)
        out = {}
        for ea, ca in ta.items():
            for eb, cb in tb.items():
                e = tuple(x + y for x, y in zip(ea, eb)) if vars else ()
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return Poly(vars, out)

    __rmul__ = __mul__

    def scaled(self, c):
        if c == 0:
            return _P_ZERO
        return Poly(self.vars, {e: k * c for e, k in self.terms.items()}, _normalized=True)

    # -- structure helpers

    def content(self):
        """gcd of the integer coefficients (positive; 0 for the zero poly)."""
        g = 0
        for c in self.terms.values():
            g = _int_gcd(g, abs(c))
            if g == 1:
                return 1
        return g

    def leading(self):
        """(exponent tuple, coefficient) of the lex-largest monomial."""
        e = max(self.terms)
        return e, self.terms[e]

    def leading_coeff_sign(self):
        return 1 if self.terms[max(self.terms)] > 0 else -1

    def term_gcd(self):
        """Largest monomial (with content) dividing every term."""
        mins = None
        for e in self.terms:
            mins = list(e) if mins is None else [min(a, b) for a, b in zip(mins, e)]
        return Poly(self.vars, {tuple(mins): self.content()}) if mins is not None else _P_ZERO

    def degree(self, var):
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=0)

    def divexact(self, other):
        """Exact division; raises ScalarError when the division is inexact."""
        if other.is_zero:
            raise DivisionByZero(self)
        if self.is_zero:
            return _P_ZERO
        if other.is_const:
            d = other.const_value()
            out = {}
            for e, c in self.terms.items():
                if c % d:
                    raise ScalarError("inexact polynomial division")
                out[e] = c // d
            return Poly(self.vars, out, _normalized=True)
        vars, ta, tb = self._aligned(other)
        rem = dict(ta)
        eb, cb = max(tb), tb[max(tb)]
        quo = {}
        while rem:
            ea = max(rem)
            ca = rem[ea]
            eq = tuple(x - y for x, y in zip(ea, eb))
            if any(x < 0 for x in eq) or ca % cb:
                raise ScalarError("inexact polynomial division")
            cq = ca // cb
            quo[eq] = cq
            for e2, c2 in tb.items():
                e = tuple(x + y for x, y in zip(eq, e2))
                s = rem.get(e, 0) - cq * c2
                if s:
                    rem[e] = s
                elif e in rem:
                    del rem[e]
        return Poly(vars, quo)

    # -- substitution / evaluation

    def subs(self, mapping):
        """Substitute symbols by Rat values; returns a Rat."""
        if not self.vars:
            return Rat.from_int(self.const_value())
        if not any(v in mapping for v in self.vars):
            return Rat(self, _P_ONE)
        pows = {}

        def power(v, e):
            key = (v, e)
            if key not in pows:
                pows[key] = Rat.lift(mapping[v]) ** e
            return pows[key]

        kept_vars = tuple(v for v in self.vars if v not in mapping)
        kept_idx = [i for i, v in enumerate(self.vars) if v not in mapping]
        # group terms by their substituted factor to batch the kept part
        grouped = {}
        for e, c in self.terms.items():
            factor = RAT_ONE
            for v, ex in zip(self.vars, e):
                if ex and v in mapping:
                    factor = factor * power(v, ex)
            ke = tuple(e[i] for i in kept_idx)
            grouped.setdefault(factor, {}).setdefault(ke, 0)
            grouped[factor][ke] += c
        total = RAT_ZERO
        for factor, terms in grouped.items():
            total = total + factor * Rat(Poly(kept_vars, terms), _P_ONE)
        return total

    def shift_sym(self, sym, k):
        """Substitute sym -> sym * q^(2k).  Returns (poly, m) with value poly/q^m."""
        if k == 0 or sym not in self.vars:
            return self, 0
        i = self.vars.index(sym)
        vars = self.vars
        if "q" not in vars:
            vars = tuple(sorted(set(vars) | {"q"}))
            terms = _remap(self, vars)
            i = vars.index(sym)
        else:
            terms = self.terms
        jq = vars.index("q")
        shifts = {e: 2 * k * e[i] for e in terms}
        m = -min(shifts.values(), default=0)
        m = max(m, 0)
        out = {}
        for e, c in terms.items():
            e2 = list(e)
            e2[jq] += shifts[e] + m
            out[tuple(e2)] = c
        return Poly(vars, out), m


def _remap(poly, vars):
    idx = [vars.index(v) for v in poly.vars]
    n = len(vars)
    out = {}
    for e, c in poly.terms.items():
        e2 = [0] * n
        for j, x in zip(idx, e):
            e2[j] = x
        out[tuple(e2)] = c
    return out


_P_ZERO = Poly()
_P_ONE = Poly.const(1)


# ---------------------------------------------------------------------------
# multivariate gcd (primitive pseudo-remainder sequence)


def poly_gcd(a, b):
    if a.is_zero:
        return b if b.is_zero or b.leading_coeff_sign() > 0 else -b
    if b.is_zero:
        return a if a.leading_coeff_sign() > 0 else -a
    if a.is_const and b.is_const:
        return Poly.const(_int_gcd(abs(a.const_value()), abs(b.const_value())))
    if a.is_term or b.is_term:
        t = a if a.is_term else b
        o = b if a.is_term else a
        og = o.term_gcd()
        vars, te, oe = t._aligned(og)
        (ea, ca), (eb, cb) = next(iter(te.items())), next(iter(oe.items()))
        e = tuple(min(x, y) for x, y in zip(ea, eb)) if vars else ()
        return Poly(vars, {e: _int_gcd(abs(ca), abs(cb))})
    vars = tuple(sorted(set(a.vars) | set(b.vars)))
    main = vars[-1]
    ua, ca = _primitive_univar(a, main)
    ub, cb = _primitive_univar(b, main)
    cg = poly_gcd(ca, cb)
    if max(ua) < max(ub):
        ua, ub = ub, ua
    while True:
        r = _pseudo_rem(ua, ub)
        if not r:
            break
        cont = None
        for p in r.values():
            cont = p if cont is None else poly_gcd(cont, p)
            if cont.is_const and abs(cont.const_value()) == 1:
                break
        if not (cont.is_const and abs(cont.const_value()) == 1):
            r = {d: p.divexact(cont) for d, p in r.items()}
        ua, ub = ub, r
    if max(ub) == 0:
        prim = _P_ONE
    else:
        prim = _from_univar(ub, main)
    g = cg * prim
    return g if g.leading_coeff_sign() > 0 else -g


def _primitive_univar(p, main):
    u = _as_univar(p, main)
    cont = None
    for c in u.values():
        cont = c if cont is None else poly_gcd(cont, c)
    return {d: c.divexact(cont) for d, c in u.items()}, cont


def _as_univar(p, main):
    """View p as a dict {degree in main: Poly in the remaining symbols}."""
    if main not in p.vars:
        return {0: p}
    i = p.vars.index(main)
    rest = p.vars[:i] + p.vars[i + 1 :]
    out = {}
    for e, c in p.terms.items():
        d = e[i]
        e2 = e[:i] + e[i + 1 :]
        out.setdefault(d, {})[e2] = c
    return {d: Poly(rest, t) for d, t in out.items()}


def _from_univar(u, main):
    total = _P_ZERO
    for d, c in u.items():
        total = total + c * Poly.sym(main, d) if d else total + c
    return total


def _pseudo_rem(ua, ub):
    """Pseudo-remainder of univariate polys with Poly coefficients."""
    db = max(ub)
    lb = ub[db]
    r = dict(ua)
    while r and max(r) >= db:
        d = max(r)
        lr = r[d]
        r = {k: v * lb for k, v in r.items()}
        for k, v in ub.items():
            kk = k + d - db
            s = r.get(kk, _P_ZERO) - v * lr
            if s.is_zero:
                r.pop(kk, None)
            else:
                r[kk] = s
    return r


# ---------------------------------------------------------------------------
# rational functions


class Rat:
    """Reduced fraction of two Poly values.

    Canonical form: gcd(num, den) trivial, contents coprime, and the
    denominator's lex-leading coefficient positive.  Equality and zero
    tests are structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=_P_ONE, _reduced=False):
        if den.is_zero:
            raise DivisionByZero(num)
        if not _reduced:
            if num.is_zero:
                den = _P_ONE
            else:
                g = poly_gcd(num, den)
                if not (g.is_const and g.const_value() == 1):
                    num = num.divexact(g)
                    den = den.divexact(g)
                if den.leading_coeff_sign() < 0:
                    num, den = -num, -den
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors

    @staticmethod
    def from_int(c):
        if c == 0:
            return RAT_ZERO
        return Rat(Poly.const(c), _P_ONE, _reduced=True)

    @staticmethod
    def from_fraction(fr):
        return Rat(Poly.const(fr.numerator), Poly.const(fr.denominator))

    @staticmethod
    def lift(x):
        if isinstance(x, Rat):
            return x
        if isinstance(x, int):
            return Rat.from_int(x)
        if isinstance(x, Fraction):
            return Rat.from_fraction(x)
        raise TypeError(f"cannot lift {type(x)} to Rat")

    @staticmethod
    def sym(name, exp=1):
        if exp >= 0:
            return Rat(Poly.sym(name, exp), _P_ONE, _reduced=True)
        return Rat(_P_ONE, Poly.sym(name, -exp), _reduced=True)

    @staticmethod
    def q_power(k):
        return Rat.sym("q", k)

    # -- predicates

    @property
    def is_zero(self):
        return self.num.is_zero

    @property
    def is_one(self):
        return self.num == _P_ONE and self.den == _P_ONE

    def __bool__(self):
        return not self.num.is_zero

    def __eq__(self, other):
        if isinstance(other, int):
            other = Rat.from_int(other)
        return isinstance(other, Rat) and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"Rat({render(self)!r})"

    # -- arithmetic

    def __add__(self, other):
        if isinstance(other, int):
            other = Rat.from_int(other)
        elif not isinstance(other, Rat):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return Rat(self.num + other.num, self.den)
        g = poly_gcd(self.den, other.den)
        if g.is_const and g.const_value() == 1:
            return Rat(self.num * other.den + other.num * self.den, self.den * other.den)
        da = self.den.divexact(g)
        db = other.den.divexact(g)
        return Rat(self.num * db + other.num * da, da * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = Rat.from_int(other)
        return self + (-other)

    def __rsub__(self, other):
        return Rat.lift(other) - self

    def __neg__(self):
        return Rat(-self.num, self.den, _reduced=True)

    def __mul__(self, other):
        if isinstance(other, int):
            other = Rat.from_int(other)
        elif not isinstance(other, Rat):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return RAT_ZERO
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = self.num if _is_unit(g1) else self.num.divexact(g1)
        d2 = other.den if _is_unit(g1) else other.den.divexact(g1)
        n2 = other.num if _is_unit(g2) else other.num.divexact(g2)
        d1 = self.den if _is_unit(g2) else self.den.divexact(g2)
        num = n1 * n2
        den = d1 * d2
        if den.leading_coeff_sign() < 0:
            num, den = -num, -den
        return Rat(num, den, _reduced=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = Rat.from_int(other)
        if other.is_zero:
            raise DivisionByZero(other)
        return self * Rat(other.den, other.num)

    def __rtruediv__(self, other):
        return Rat.lift(other) / self

    def inv(self):
        if self.is_zero:
            raise DivisionByZero(self)
        return Rat(self.den, self.num)

    def __pow__(self, e):
        if e == 0:
            return RAT_ONE
        if e < 0:
            return self.inv() ** (-e)
        base, out = self, RAT_ONE
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    # -- substitution

    def subs(self, mapping):
        num = self.num.subs(mapping)
        den = self.den.subs(mapping)
        return num / den

    def shift_sym(self, sym, k):
        """Exact substitution sym -> sym * q^(2k)."""
        n, mn = self.num.shift_sym(sym, k)
        d, md = self.den.shift_sym(sym, k)
        if mn == md:
            return Rat(n, d)
        if mn > md:
            return Rat(n, d * Poly.sym("q", mn - md))
        return Rat(n * Poly.sym("q", md - mn), d)

    def symbols(self):
        return set(self.num.vars) | set(self.den.vars)


def _is_unit(g):
    return g.is_const and g.const_value() == 1


RAT_ZERO = Rat(_P_ZERO, _P_ONE, _reduced=True)
RAT_ONE = Rat(_P_ONE, _P_ONE, _reduced=True)
Q = Rat.sym("q")
QINV = Rat.sym("q", -1)


def q_int(n, base=1):
    """[n]_q = (q^n - q^-n)/(q - q^-1); base=-1 gives the q->q^-1 image."""
    k = n * base
    num = Rat.q_power(k) - Rat.q_power(-k)
    den = Rat.q_power(base) - Rat.q_power(-base)
    return num / den


def q_factorial(m, base=1):
    out = RAT_ONE
    for j in range(1, m + 1):
        out = out * q_int(j, base)
    return out


def qrat_arith(a, b, op):
    """Field operations on q-rationals: op in {'add','mul','div'}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero:
            raise DivisionByZero(b)
        return a / b
    raise ValueError(f"unknown op {op!r}")


def scale_spectral(f, sym, k):
    """Replace every occurrence of sym in f by sym * q^(2k)."""
    return f.shift_sym(sym, k)


# ---------------------------------------------------------------------------
# canonical text rendering


def _render_monomial(vars, e, c, laurent_q=0):
    parts = []
    saw_q = False
    for v, ex in zip(vars, e):
        if v == "q":
            saw_q = True
            ex -= laurent_q
        if ex:
            parts.append(v if ex == 1 else f"{v}^{ex}")
    if not saw_q and laurent_q:
        parts.append(f"q^{-laurent_q}")
    if not parts:
        return str(c)
    body = "*".join(parts)
    if c == 1:
        return body
    if c == -1:
        return f"-{body}"
    return f"{c}*{body}"


def render_poly(p, laurent_q=0):
    """Render with terms in descending lex order; optional global q^-m fold."""
    if p.is_zero:
        return "0"
    pieces = []
    for e in sorted(p.terms, reverse=True):
        pieces.append(_render_monomial(p.vars, e, p.terms[e], laurent_q))
    out = pieces[0]
    for s in pieces[1:]:
        out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
    return out


def render(r):
    """Canonical rendering of a Rat; stable across runs."""
    if r.den == _P_ONE:
        return render_poly(r.num)
    if r.den.is_term:
        (e, c) = next(iter(r.den.terms.items()))
        if c == 1 and r.den.vars == ("q",):
            return render_poly(r.num, laurent_q=e[0])
    return f"({render_poly(r.num)})/({render_poly(r.den)})"


# ---------------------------------------------------------------------------
# truncated power series


ASCENDING = "x"
DESCENDING = "x^-1"


class TruncSeries:
    """Power series in x (or x^-1) with Rat coefficients, exact to order K."""

    __slots__ = ("coeffs", "K", "direction")

    def __init__(self, coeffs, K=None, direction=ASCENDING):
        if K is None:
            K = len(coeffs) - 1
        coeffs = list(coeffs)[: K + 1]
        coeffs += [RAT_ZERO] * (K + 1 - len(coeffs))
        self.coeffs = coeffs
        self.K = K
        self.direction = direction

    @staticmethod
    def one(K, direction=ASCENDING):
        return TruncSeries([RAT_ONE] + [RAT_ZERO] * K, K, direction)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __eq__(self, other):
        return (
            isinstance(other, TruncSeries)
            and self.direction == other.direction
            and self.K == other.K
            and self.coeffs == other.coeffs
        )

    @property
    def is_zero(self):
        return all(c.is_zero for c in self.coeffs)

    def _binary_check(self, other):
        if self.direction != other.direction:
            raise ScalarError("mixed series directions")
        return min(self.K, other.K)

    def __add__(self, other):
        K = self._binary_check(other)
        return TruncSeries([self[k] + other[k] for k in range(K + 1)], K, self.direction)

    def __sub__(self, other):
        K = self._binary_check(other)
        return TruncSeries([self[k] - other[k] for k in range(K + 1)], K, self.direction)

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.K, self.direction)

    def __mul__(self, other):
        if isinstance(other, Rat):
            return TruncSeries([c * other for c in self.coeffs], self.K, self.direction)
        K = self._binary_check(other)
        out = [RAT_ZERO] * (K + 1)
        for i in range(K + 1):
            if self[i].is_zero:
                continue
            for j in range(K + 1 - i):
                if not other[j].is_zero:
                    out[i + j] = out[i + j] + self[i] * other[j]
        return TruncSeries(out, K, self.direction)

    __rmul__ = __mul__

    def recip(self):
        """Multiplicative inverse; requires an invertible constant term."""
        if self[0].is_zero:
            raise DivisionByZero(self)
        c0 = self[0].inv()
        out = [c0]
        for k in range(1, self.K + 1):
            s = RAT_ZERO
            for j in range(1, k + 1):
                s = s + self[j] * out[k - j]
            out.append(-c0 * s)
        return TruncSeries(out, self.K, self.direction)

    def scale_arg(self, k):
        """x -> x q^(2k), exact on coefficients."""
        sgn = 1 if self.direction == ASCENDING else -1
        return TruncSeries(
            [c * Rat.q_power(2 * k * e * sgn) for e, c in enumerate(self.coeffs)],
            self.K,
            self.direction,
        )


def rat_to_series(r, sym, K, at_infinity=False):
    """Expand a Rat in powers of sym (or 1/sym) to order K, exactly."""
    if at_infinity:
        # substitute sym -> 1/y and expand at y = 0
        n = r.num.degree(sym)
        d = r.den.degree(sym)
        num_u = _as_univar(r.num, sym)
        den_u = _as_univar(r.den, sym)
        num = [num_u.get(n - k, _P_ZERO) for k in range(n + 1)]
        den = [den_u.get(d - k, _P_ZERO) for k in range(d + 1)]
        shift = d - n  # value = y^shift * (num poly in y)/(den poly in y)
        return _poly_quot_series(num, den, K, DESCENDING, shift)
    num_u = _as_univar(r.num, sym)
    den_u = _as_univar(r.den, sym)
    num = [num_u.get(k, _P_ZERO) for k in range(r.num.degree(sym) + 1)]
    den = [den_u.get(k, _P_ZERO) for k in range(r.den.degree(sym) + 1)]
    return _poly_quot_series(num, den, K, ASCENDING, 0)


def _poly_quot_series(num, den, K, direction, shift):
    # cancel a common power of the expansion variable
    v = 0
    while v < len(den) and den[v].is_zero:
        v += 1
    if v == len(den):
        raise DivisionByZero(den)
    if v:
        nv = 0
        while nv < len(num) and num[nv].is_zero:
            nv += 1
        if nv < v:
            raise ScalarError("series expansion has a pole at the base point")
        num = num[v:] or [_P_ZERO]
        den = den[v:]
    if shift < 0:
        raise ScalarError("series expansion has a pole at the base point")
    acc = [Rat(c) for c in num]
    denr = [Rat(c) for c in den]
    d0 = denr[0].inv()
    coeffs = []
    for k in range(K + 1 - shift):
        ck = acc[k] if k < len(acc) else RAT_ZERO
        s = RAT_ZERO
        for j in range(1, min(k, len(denr) - 1) + 1):
            s = s + denr[j] * coeffs[k - j]
        coeffs.append((ck - s) * d0)
    return TruncSeries([RAT_ZERO] * shift + coeffs, K, direction)


# ---------------------------------------------------------------------------
# the normalizing series f


def crossing_scalar(m, n):
    """g(x) with g(x)(1-xq^-2)(1-xq^(2n-2m+2)) = (1-x)(1-xq^(2n-2m))."""
    x = Rat.sym("x")
    h = 2 * n - 2 * m
    num = (RAT_ONE - x) * (RAT_ONE - x * Rat.q_power(h))
    den = (RAT_ONE - x * Rat.q_power(-2)) * (RAT_ONE - x * Rat.q_power(h + 2))
    return num / den


def solve_f_series(m, n, K):
    """Coefficients of f with f(x q^(2n-2m)) = f(x)/g(x), solved order by order.

    Fails for m == n: the shift q^(2n-2m) is 1 while the multiplier isn't,
    so the order-k linear equations are inconsistent.
    """
    if m == n:
        raise FSeriesUnsolvable(f"no solution for m = n = {m}")
    if K < 0:
        raise ValueError("K must be nonnegative")
    h = 2 * n - 2 * m
    g = rat_to_series(crossing_scalar(m, n).inv(), "x", K)  # the multiplier series
    f = [RAT_ONE]
    for k in range(1, K + 1):
        rhs = RAT_ZERO
        for j in range(k):
            rhs = rhs + f[j] * g[k - j]
        denom = Rat.q_power(h * k) - RAT_ONE
        f.append(rhs / denom)
    series = TruncSeries(f, K)
    if not f_residual(series, m, n).is_zero:
        raise ScalarError("internal error: f residual nonzero")
    return series


def f_residual(f, m, n):
    """f(x q^(2n-2m)) - f(x) * (multiplier series), truncated; zero iff f solves."""
    h = n - m
    lhs = f.scale_arg(h)
    mult = rat_to_series(crossing_scalar(m, n).inv(), "x", f.K)
    return lhs - f * mult
