"""Truncated formal-transformation groups P_r = P_0 x| Q_r.

A jet is a polynomial map R^{2n+1} -> R^{2n+1} fixing the origin, kept up
to graded level ``r``: a term in component ``i <= 2n`` has level
(weighted degree - 1), a term in the last component (weighted degree - 2),
and every stored level lies in [-1, r].  Composition and the projections
``pi_r`` are homomorphisms on the sub-semigroup with vanishing level -1
part; ``kill_level_minus_one`` conjugates into it.
"""

from __future__ import annotations

from .fields import PolyVectorField, lie_bracket, term_level
from .linalg import mat_inverse, rank, solve
from .poly import Poly, monomials_of_weighted_degree, weighted_degree
from .scalars import Q, QZERO, qstr


def _trunc_components(n, r, comps):
    dim = 2 * n + 1
    out = []
    for i, p in enumerate(comps):
        w = r + (1 if i < dim - 1 else 2)
        out.append(p.wtrunc(w))
    return out


class JetTransformation:
    """An element of the level-truncated formal transformation group."""

    __slots__ = ("n", "r", "components")

    def __init__(self, n: int, r: int, components):
        self.n = n
        self.r = r
        components = tuple(components)
        dim = 2 * n + 1
        if len(components) != dim:
            raise ValueError("need 2n+1 components")
        for i, p in enumerate(components):
            if p.nvars != dim:
                raise ValueError("component variable count mismatch")
            for e in p.terms:
                lev = term_level(n, i, e)
                if lev < -1 or lev > r:
                    raise ValueError(
                        f"term of level {lev} outside [-1, {r}] in component {i + 1}")
                if weighted_degree(e) == 0:
                    raise ValueError("jet does not fix the origin")
        self.components = components

    @property
    def dim(self):
        return 2 * self.n + 1

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls, n, r):
        dim = 2 * n + 1
        return cls(n, r, [Poly.variable(dim, j) for j in range(dim)])

    @classmethod
    def from_linear(cls, matrix, n, r):
        dim = 2 * n + 1
        comps = []
        for i in range(dim):
            terms = {}
            for j in range(dim):
                if matrix[i][j] != 0:
                    e = tuple(1 if t == j else 0 for t in range(dim))
                    terms[e] = Q(matrix[i][j])
            comps.append(Poly(dim, terms))
        return cls(n, r, comps)

    @classmethod
    def i_of_k(cls, k, n, r):
        """The standard contraction I(k) = diag(1/k * I_{2n}, 1/k^2)."""
        dim = 2 * n + 1
        comps = [Poly.variable(dim, j).scale(Q(1) / Q(k)) for j in range(2 * n)]
        comps.append(Poly.variable(dim, dim - 1).scale(Q(1) / (Q(k) * Q(k))))
        return cls(n, r, comps)

    @classmethod
    def from_terms(cls, n, r, terms):
        """Build from ``{(component, exponents): coeff}`` (0-based components)."""
        dim = 2 * n + 1
        comps = [dict() for _ in range(dim)]
        for (i, expo), c in terms.items():
            c = Q(c)
            if c == 0:
                continue
            e = tuple(expo)
            comps[i][e] = comps[i].get(e, QZERO) + c
        return cls(n, r, [Poly(dim, {e: c for e, c in d.items() if c != 0})
                          for d in comps])

    # -- level structure ---------------------------------------------------
    def level_part(self, q):
        dim = self.dim
        comps = []
        for i, p in enumerate(self.components):
            w = q + (1 if i < dim - 1 else 2)
            comps.append(p.wpart(w))
        return JetTransformation(self.n, self.r, comps)

    def levels(self):
        out = set()
        for i, p in enumerate(self.components):
            for e in p.terms:
                out.add(term_level(self.n, i, e))
        return sorted(out)

    def decompose_levels(self):
        """Map level -> homogeneous part; the parts sum to the jet."""
        return {q: self.level_part(q) for q in self.levels()}

    def p0_part(self):
        """The level-0 part F^(0); the map F -> F^(0) is multiplicative."""
        return self.level_part(0)

    def has_level_minus_one(self):
        last = self.components[-1]
        return any(weighted_degree(e) == 1 for e in last.terms)

    def project(self, r_new: int):
        """pi_{r_new}: forget levels above ``r_new`` (needs no level -1 part)."""
        if r_new > self.r:
            raise ValueError("cannot project upward")
        if self.has_level_minus_one():
            raise ValueError("projection needs a vanishing level -1 part")
        dim = self.dim
        comps = []
        for i, p in enumerate(self.components):
            w = r_new + (1 if i < dim - 1 else 2)
            comps.append(p.wtrunc(w))
        return JetTransformation(self.n, r_new, comps)

    def lift(self, r_new: int):
        """Reinterpret in P_{r_new} for ``r_new >= r`` (adds zero levels)."""
        if r_new < self.r:
            raise ValueError("use project to lower the order")
        return JetTransformation(self.n, r_new, self.components)

    # -- linear data ---------------------------------------------------------
    def linear_block(self):
        """The 2n x 2n block A of the linear part (action on x')."""
        dim = self.dim
        a = [[QZERO] * (2 * self.n) for _ in range(2 * self.n)]
        for i in range(2 * self.n):
            for j in range(2 * self.n):
                e = tuple(1 if t == j else 0 for t in range(dim))
                a[i][j] = self.components[i].coeff(e)
        return a

    def last_scalar(self):
        """The coefficient b of x_{2n+1} in the last component."""
        dim = self.dim
        e = tuple(1 if t == dim - 1 else 0 for t in range(dim))
        return self.components[-1].coeff(e)

    def is_p0(self):
        """Membership in P_0: purely level 0 with invertible linear data."""
        if self.levels() not in ([], [0]):
            return False
        if rank(self.linear_block()) != 2 * self.n:
            return False
        return self.last_scalar() != 0

    def in_p_r(self):
        """Membership in P_r: no level -1 part and invertible linear data."""
        if self.has_level_minus_one():
            return False
        return (rank(self.linear_block()) == 2 * self.n
                and self.last_scalar() != 0)

    # -- group operations ------------------------------------------------------
    def compose(self, other: "JetTransformation"):
        """Polynomial composition ``self o other`` truncated in P_min(r, r')."""
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        if self.has_level_minus_one() or other.has_level_minus_one():
            raise ValueError("composition needs vanishing level -1 parts; "
                             "apply kill_level_minus_one first")
        r = min(self.r, other.r)
        cap = r + 2
        comps = [p.subs(list(other.components), max_wdeg=cap)
                 for p in self.components]
        return JetTransformation(self.n, r, _trunc_components(self.n, r, comps))

    def invert(self):
        """Group inverse in P_r, computed by successive level cancellation."""
        if self.has_level_minus_one():
            raise ValueError("inversion needs a vanishing level -1 part")
        g0_inv = _invert_p0(self.p0_part())
        h = g0_inv
        for q in range(1, self.r + 1):
            delta = h.compose(self).level_part(q)
            if all(p.is_zero() for p in delta.components):
                continue
            correction = _compose_homogeneous(delta, g0_inv)
            h = _add_jets(h, _neg_jet(correction))
        return h

    def __eq__(self, other):
        return (isinstance(other, JetTransformation) and self.n == other.n
                and self.r == other.r and self.components == other.components)

    def __hash__(self):
        return hash((self.n, self.r, self.components))

    def __repr__(self):
        comps = ", ".join(repr(p) for p in self.components)
        return f"Jet(n={self.n}, r={self.r}; {comps})"


def _add_jets(a, b):
    return JetTransformation(a.n, a.r, [p + q for p, q in
                                        zip(a.components, b.components)])


def _neg_jet(a):
    return JetTransformation(a.n, a.r, [-p for p in a.components])


def _compose_homogeneous(delta, g):
    """``delta o g`` for a homogeneous-level delta and a level-0 jet g."""
    cap = delta.r + 2
    comps = [p.subs(list(g.components), max_wdeg=cap) for p in delta.components]
    return JetTransformation(delta.n, delta.r, comps)


def _invert_p0(g0: JetTransformation):
    """Exact inverse of a P_0 element (A x', b x_{2n+1} + Q(x'))."""
    n, r = g0.n, g0.r
    dim = 2 * n + 1
    a = g0.linear_block()
    b = g0.last_scalar()
    if b == 0:
        raise ValueError("singular linear data")
    a_inv = mat_inverse(a)
    comps = []
    for i in range(2 * n):
        terms = {}
        for j in range(2 * n):
            if a_inv[i][j] != 0:
                e = tuple(1 if t == j else 0 for t in range(dim))
                terms[e] = a_inv[i][j]
        comps.append(Poly(dim, terms))
    # last: (x_{2n+1} - Q(A^{-1} x')) / b
    q_poly = g0.components[-1] - Poly.monomial(
        dim, tuple(1 if t == dim - 1 else 0 for t in range(dim)), b)
    subs_vec = [comps[j] for j in range(2 * n)] + [Poly.zero(dim)]
    q_pulled = q_poly.subs(subs_vec)
    last = (Poly.variable(dim, dim - 1) - q_pulled).scale(Q(1) / b)
    comps.append(last)
    return JetTransformation(n, r, comps)


def compose(f, g):
    return f.compose(g)


def invert(f):
    return f.invert()


def jet_power(f: JetTransformation, m: int):
    """``f`` composed with itself ``m`` times (negative m uses the inverse)."""
    if m < 0:
        return jet_power(f.invert(), -m)
    result = JetTransformation.identity(f.n, f.r)
    base = f
    while m:
        if m & 1:
            result = result.compose(base)
        m >>= 1
        if m:
            base = base.compose(base)
    return result


def kill_level_minus_one(f: JetTransformation):
    """Conjugate by x_{2n+1} -> x_{2n+1} + <v, x'> to remove the level -1 part.

    Returns ``(conjugator, f_conjugated)`` with the conjugator linear.  The
    vector v solves one exact linear system; it is singular only when the
    linear data is far from I(k) (b an eigenvalue of A^T).
    """
    n, r = f.n, f.r
    dim = 2 * n + 1
    w = [f.components[-1].coeff(tuple(1 if t == j else 0 for t in range(dim)))
         for j in range(2 * n)]
    a = f.linear_block()
    b = f.last_scalar()
    # level -1 of L o F o L^{-1} is w + (A^T - b I) v; solve for zero
    rows = [[a[j][i] - (b if i == j else QZERO) for j in range(2 * n)]
            for i in range(2 * n)]
    v = solve(rows, [-wi for wi in w])
    if v is None:
        raise ValueError("level -1 removal is singular for this linear data")
    conj = _shear(n, r, v)
    conj_inv = _shear(n, r, [-vi for vi in v])
    # conjugation must bypass the level -1 guard in compose
    cap = r + 2
    mid = [p.subs(list(conj_inv.components), max_wdeg=cap) for p in f.components]
    out = [p.subs(mid, max_wdeg=cap) for p in conj.components]
    f2 = JetTransformation(n, r, _trunc_components(n, r, out))
    return conj, f2


def _shear(n, r, v):
    dim = 2 * n + 1
    comps = [Poly.variable(dim, j) for j in range(2 * n)]
    last = Poly.variable(dim, dim - 1)
    for j, vj in enumerate(v):
        if vj != 0:
            last = last + Poly.variable(dim, j).scale(vj)
    return JetTransformation(n, r, comps + [last])


# -- the nilpotent part: exp and log ------------------------------------------

def jet_exp(d: PolyVectorField, r: int):
    """exp of a derivation with levels in [1, r], via the terminating series.

    Each application of the derivation raises the level by at least one, so
    the series applied to the coordinate functions stops at level r.
    """
    levels = d.levels()
    if levels and (levels[0] < 1 or levels[-1] > r):
        raise ValueError("jet_exp needs levels within [1, r]")
    n = d.n
    dim = 2 * n + 1
    cap = r + 2
    comps = []
    for i in range(dim):
        term = Poly.variable(dim, i)
        total = term
        m = 1
        while True:
            term = d.apply_to(term, max_wdeg=cap).scale(Q(1, m))
            if term.is_zero():
                break
            total = total + term
            m += 1
        comps.append(total)
    return JetTransformation(n, r, _trunc_components(n, r, comps))


def jet_log(f: JetTransformation):
    """Order-by-order inverse of :func:`jet_exp` on Q_r."""
    n, r = f.n, f.r
    if f.p0_part() != JetTransformation.identity(n, r).p0_part():
        raise ValueError("jet_log needs an element of Q_r (level-0 part = id)")
    if f.has_level_minus_one():
        raise ValueError("jet_log needs a vanishing level -1 part")
    d = PolyVectorField.zero(n)
    for q in range(1, r + 1):
        current = jet_exp(d, r) if not d.is_zero() else JetTransformation.identity(n, r)
        gap = _add_jets(f, _neg_jet(current)).level_part(q)
        terms = {}
        for i, p in enumerate(gap.components):
            for e, c in p.terms.items():
                terms[(i, e)] = c
        if terms:
            d = d + PolyVectorField.from_terms(n, terms)
    if jet_exp(d, r) != f:
        raise ValueError("jet_log failed to converge; input not in Q_r")
    return d


def q_r_bracket(d1: PolyVectorField, d2: PolyVectorField, r: int):
    """The q_r bracket: the field bracket truncated at level r."""
    return lie_bracket(d1, d2, max_level=r)


# -- the P_0 action on fields ---------------------------------------------------

def act_on_field(f: JetTransformation, x: PolyVectorField):
    """Pushforward of a field by a P_0 element, exactly.

    Level-0 maps preserve the weighted degree, so no truncation occurs and
    the action is a Lie algebra automorphism of the graded fields.
    """
    if not f.is_p0():
        raise ValueError("act_on_field needs an element of P_0")
    return pushforward_jet(f, x, truncation=None)


def pushforward_jet(f: JetTransformation, x: PolyVectorField, truncation=None):
    """``(Df . X) o f^{-1}`` with levels above ``truncation`` discarded."""
    n = f.n
    dim = 2 * n + 1
    f_inv = f.invert()
    cap = None
    if truncation is not None:
        cap = truncation + 2
    comps = []
    for i in range(dim):
        p = Poly.zero(dim)
        for j in range(dim):
            dj = f.components[i].diff(j)
            if not dj.is_zero() and not x.components[j].is_zero():
                p = p + dj.mul(x.components[j], cap)
        comps.append(p.subs(list(f_inv.components), max_wdeg=cap))
    out = PolyVectorField(n, comps)
    if truncation is not None:
        out = out.truncate_level(truncation)
    return out


# -- level-space bases for transformations --------------------------------------

def transformation_monomials_of_level(n, q):
    """Canonical labels ``(component, exponents)`` of the level-q jet space."""
    dim = 2 * n + 1
    out = []
    for i in range(dim):
        w = q + (1 if i < dim - 1 else 2)
        if w < 1:  # constants would move the origin
            continue
        for e in monomials_of_weighted_degree(dim, w):
            out.append((i, e))
    return out


# -- serialization ----------------------------------------------------------------

def jet_to_obj(f: JetTransformation):
    out = {"n": f.n, "r": f.r, "terms": []}
    for i, p in enumerate(f.components):
        for e, c in p.sorted_terms():
            out["terms"].append({"component": i + 1, "exponents": list(e),
                                 "coeff": qstr(c)})
    return out


def jet_from_obj(obj):
    from .scalars import qparse
    n = int(obj["n"])
    r = int(obj["r"])
    terms = {}
    for rec in obj["terms"]:
        i = int(rec["component"]) - 1
        e = tuple(int(v) for v in rec["exponents"])
        key = (i, e)
        terms[key] = terms.get(key, QZERO) + qparse(rec["coeff"])
    return JetTransformation.from_terms(n, r, terms)
