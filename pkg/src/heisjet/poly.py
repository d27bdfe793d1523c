"""Sparse multivariate polynomials over the rationals, weighted by I(k).

Variables are ``x_1, ..., x_m`` with ``m = 2n + 1``.  The last variable
carries weight 2 and all others weight 1, so the weighted degree of a
monomial ``x^e`` is ``e_1 + ... + e_{2n} + 2*e_{2n+1}``.  Terms are stored
sparsely as ``{exponent tuple: coefficient}`` and iterated in the canonical
order (weighted degree, then lexicographic) so serialization is stable.
"""

from __future__ import annotations

from itertools import combinations_with_replacement

from .scalars import Q, QZERO, qparse, qstr


def weighted_degree(expo) -> int:
    """Weighted degree of an exponent tuple (last variable weighs 2)."""
    return sum(expo[:-1]) + 2 * expo[-1]


def monomial_key(expo):
    """Canonical sort key: graded by weighted degree, then lexicographic."""
    return (weighted_degree(expo), expo)


def monomials_of_weighted_degree(nvars: int, w: int):
    """All exponent tuples in ``nvars`` variables of weighted degree ``w``.

    Yields tuples in canonical (lexicographic) order.
    """
    if w < 0:
        return
    out = []
    for elast in range(w // 2 + 1):
        rest = w - 2 * elast
        # compositions of `rest` into nvars-1 parts
        m = nvars - 1
        if m == 0:
            if rest == 0:
                out.append((elast,))
            continue
        for bars in combinations_with_replacement(range(m), rest):
            e = [0] * m
            for b in bars:
                e[b] += 1
            out.append(tuple(e) + (elast,))
    out.sort()
    yield from out


class Poly:
    """A sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        if terms is None:
            terms = {}
        self.terms = terms

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        c = Q(c)
        if c == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, j):
        """The coordinate polynomial ``x_{j+1}`` (0-based index ``j``)."""
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): Q(1)})

    @classmethod
    def monomial(cls, nvars, expo, c=1):
        c = Q(c)
        if c == 0:
            return cls(nvars)
        expo = tuple(expo)
        if len(expo) != nvars:
            raise ValueError("exponent length does not match variable count")
        return cls(nvars, {expo: c})

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s = s + c
                if s == 0:
                    del terms[e]
                else:
                    terms[e] = s
        return Poly(self.nvars, terms)

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Q(c)
        if c == 0:
            return Poly(self.nvars)
        return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def mul(self, other, max_wdeg=None):
        """Product, discarding terms of weighted degree above ``max_wdeg``."""
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            wa = weighted_degree(ea)
            for eb, cb in b.items():
                if max_wdeg is not None and wa + weighted_degree(eb) > max_wdeg:
                    continue
                e = tuple(i + j for i, j in zip(ea, eb))
                s = out.get(e)
                if s is None:
                    out[e] = ca * cb
                else:
                    s = s + ca * cb
                    if s == 0:
                        del out[e]
                    else:
                        out[e] = s
        return Poly(self.nvars, out)

    def __mul__(self, other):
        return self.mul(other)

    def pow(self, m: int, max_wdeg=None):
        if m < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.constant(self.nvars, 1)
        base = self
        while m:
            if m & 1:
                result = result.mul(base, max_wdeg)
            m >>= 1
            if m:
                base = base.mul(base, max_wdeg)
        return result

    # -- calculus and substitution ----------------------------------------
    def diff(self, j: int):
        """Partial derivative with respect to variable ``j`` (0-based)."""
        out = {}
        for e, c in self.terms.items():
            k = e[j]
            if k == 0:
                continue
            e2 = list(e)
            e2[j] = k - 1
            out[tuple(e2)] = c * k
        return Poly(self.nvars, out)

    def subs(self, values, max_wdeg=None):
        """Substitute polynomials ``values[j]`` for the variables.

        All intermediate products are truncated at weighted degree
        ``max_wdeg`` when given, which keeps jet composition exact for the
        retained range.
        """
        if len(values) != self.nvars:
            raise ValueError("substitution needs one polynomial per variable")
        nv = values[0].nvars
        powers = [{0: Poly.constant(nv, 1)} for _ in range(self.nvars)]

        def power(j, m):
            cache = powers[j]
            if m in cache:
                return cache[m]
            best = max(k for k in cache if k <= m)
            acc = cache[best]
            for k in range(best + 1, m + 1):
                acc = acc.mul(values[j], max_wdeg)
                cache[k] = acc
            return acc

        total = Poly(nv)
        for e, c in self.terms.items():
            term = Poly.constant(nv, c)
            for j, m in enumerate(e):
                if m:
                    term = term.mul(power(j, m), max_wdeg)
            total = total + term
        return total

    def eval(self, point):
        """Evaluate at a rational point."""
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        point = [Q(v) for v in point]
        total = QZERO
        for e, c in self.terms.items():
            v = c
            for j, m in enumerate(e):
                for _ in range(m):
                    v = v * point[j]
            total = total + v
        return total

    # -- weighted-degree structure ----------------------------------------
    def wtrunc(self, max_wdeg: int):
        """Drop all terms of weighted degree above ``max_wdeg``."""
        return Poly(self.nvars, {e: c for e, c in self.terms.items()
                                 if weighted_degree(e) <= max_wdeg})

    def wpart(self, w: int):
        """The weighted-homogeneous part of degree ``w``."""
        return Poly(self.nvars, {e: c for e, c in self.terms.items()
                                 if weighted_degree(e) == w})

    def wdegrees(self):
        return sorted({weighted_degree(e) for e in self.terms})

    def max_total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    # -- predicates and views ----------------------------------------------
    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, QZERO)

    def coeff(self, expo):
        return self.terms.get(tuple(expo), QZERO)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: monomial_key(kv[0]))

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{j + 1}^{m}" if m > 1 else f"x{j + 1}"
                            for j, m in enumerate(e) if m)
            bits.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def poly_to_obj(p: Poly):
    """JSON-ready list of term records in canonical order."""
    return [{"exponents": list(e), "coeff": qstr(c)} for e, c in p.sorted_terms()]


def poly_from_obj(nvars, obj) -> Poly:
    terms = {}
    for rec in obj:
        e = tuple(int(v) for v in rec["exponents"])
        if len(e) != nvars:
            raise ValueError("exponent length does not match variable count")
        c = qparse(rec["coeff"])
        if c != 0:
            terms[e] = terms.get(e, QZERO) + c
    return Poly(nvars, {e: c for e, c in terms.items() if c != 0})


class CPoly:
    """A polynomial with Gaussian-rational coefficients, stored as re + i*im."""

    __slots__ = ("re", "im")

    def __init__(self, re: Poly, im: Poly | None = None):
        if im is None:
            im = Poly.zero(re.nvars)
        self.re = re
        self.im = im

    @classmethod
    def zero(cls, nvars):
        return cls(Poly.zero(nvars))

    @classmethod
    def constant(cls, nvars, z):
        from .scalars import as_cq
        z = as_cq(z)
        return cls(Poly.constant(nvars, z.re), Poly.constant(nvars, z.im))

    def __add__(self, other):
        return CPoly(self.re + other.re, self.im + other.im)

    def __neg__(self):
        return CPoly(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def mul(self, other, max_wdeg=None):
        return CPoly(self.re.mul(other.re, max_wdeg) - self.im.mul(other.im, max_wdeg),
                     self.re.mul(other.im, max_wdeg) + self.im.mul(other.re, max_wdeg))

    def __mul__(self, other):
        return self.mul(other)

    def cscale(self, z):
        from .scalars import as_cq
        z = as_cq(z)
        return CPoly(self.re.scale(z.re) - self.im.scale(z.im),
                     self.re.scale(z.im) + self.im.scale(z.re))

    def pow(self, m, max_wdeg=None):
        result = CPoly.constant(self.re.nvars, 1)
        base = self
        while m:
            if m & 1:
                result = result.mul(base, max_wdeg)
            m >>= 1
            if m:
                base = base.mul(base, max_wdeg)
        return result

    def wtrunc(self, max_wdeg):
        return CPoly(self.re.wtrunc(max_wdeg), self.im.wtrunc(max_wdeg))

    def constant_term(self):
        from .scalars import CQ
        return CQ(self.re.constant_term(), self.im.constant_term())

    def is_zero(self):
        return self.re.is_zero() and self.im.is_zero()

    def __eq__(self, other):
        return isinstance(other, CPoly) and self.re == other.re and self.im == other.im

    def __repr__(self):
        return f"({self.re!r}) + i*({self.im!r})"
