"""Polynomial vector fields on R^{2n+1} with the weighted gradation.

A field lives in graded level ``r`` when pushing it forward by
``I(k) = diag(1/k, ..., 1/k, 1/k^2)`` multiplies it by ``k^r``.  In terms
of monomials, a term in component ``i <= 2n`` has level (weighted degree
of the monomial) - 1 and a term in the last component has level
(weighted degree) - 2, so levels are bounded below by -2.

Bracket convention
------------------
``[X, Y]_i = sum_j (Y_j d_j X_i - X_j d_j Y_i)``.  This is the Lie algebra
of the diffeomorphism group under composition: with it, exp of fields is
BCH-compatible with jet composition, the chart realization of
su(n+1,1) is a genuine (not anti-) homomorphism, and ``ad(E0) = r`` on
level-r fields for the standard Euler-type field E0.
"""

from __future__ import annotations

from .linalg import (mat_inverse, mat_vec, nullspace_sparse, rank,
                     row_space_echelon, solve)
from .poly import Poly, monomials_of_weighted_degree, poly_from_obj, weighted_degree
from .scalars import Q, QZERO, qstr


class PolyVectorField:
    """A sparse polynomial vector field on R^{2n+1}."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components):
        self.n = n
        components = tuple(components)
        if len(components) != 2 * n + 1:
            raise ValueError("need 2n+1 components")
        for p in components:
            if p.nvars != 2 * n + 1:
                raise ValueError("component variable count mismatch")
        self.components = components

    @property
    def dim(self):
        return 2 * self.n + 1

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n):
        return cls(n, [Poly.zero(2 * n + 1) for _ in range(2 * n + 1)])

    @classmethod
    def from_terms(cls, n, terms):
        """Build from ``{(component, exponents): coeff}`` (0-based components)."""
        dim = 2 * n + 1
        comps = [dict() for _ in range(dim)]
        for (i, expo), c in terms.items():
            c = Q(c)
            if c == 0:
                continue
            e = tuple(expo)
            comps[i][e] = comps[i].get(e, QZERO) + c
        return cls(n, [Poly(dim, {e: c for e, c in d.items() if c != 0})
                       for d in comps])

    @classmethod
    def monomial_field(cls, n, comp, expo, c=1):
        return cls.from_terms(n, {(comp, tuple(expo)): c})

    @classmethod
    def partial(cls, n, i):
        """The constant field d/dx_{i+1} (0-based index ``i``)."""
        dim = 2 * n + 1
        return cls.monomial_field(n, i, (0,) * dim)

    # -- linear structure ---------------------------------------------------
    def __add__(self, other):
        self._check(other)
        return PolyVectorField(self.n, [a + b for a, b in
                                        zip(self.components, other.components)])

    def __neg__(self):
        return PolyVectorField(self.n, [-a for a in self.components])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return PolyVectorField(self.n, [a.scale(c) for a in self.components])

    def is_zero(self):
        return all(p.is_zero() for p in self.components)

    def __eq__(self, other):
        return (isinstance(other, PolyVectorField) and self.n == other.n
                and self.components == other.components)

    def __hash__(self):
        return hash((self.n, self.components))

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("dimension mismatch")

    # -- graded structure ----------------------------------------------------
    def term_items(self):
        for i, p in enumerate(self.components):
            for e, c in p.terms.items():
                yield (i, e), c

    def levels(self):
        out = set()
        for (i, e), _ in self.term_items():
            out.add(term_level(self.n, i, e))
        return sorted(out)

    def level_part(self, q):
        dim = self.dim
        comps = []
        for i, p in enumerate(self.components):
            w = q + (1 if i < dim - 1 else 2)
            comps.append(p.wpart(w))
        return PolyVectorField(self.n, comps)

    def truncate_level(self, max_level):
        dim = self.dim
        comps = []
        for i, p in enumerate(self.components):
            w = max_level + (1 if i < dim - 1 else 2)
            comps.append(p.wtrunc(w))
        return PolyVectorField(self.n, comps)

    def apply_to(self, f: Poly, max_wdeg=None):
        """The derivation action ``sum_j X_j d_j f``."""
        out = Poly.zero(f.nvars)
        for j, xj in enumerate(self.components):
            if not xj.is_zero():
                out = out + xj.mul(f.diff(j), max_wdeg)
        return out

    def eval(self, point):
        return [p.eval(point) for p in self.components]

    def __repr__(self):
        bits = [f"({p!r})*d{i + 1}" for i, p in enumerate(self.components)
                if not p.is_zero()]
        return " + ".join(bits) if bits else "0"


def term_level(n, comp, expo):
    return weighted_degree(expo) - (1 if comp < 2 * n else 2)


def lie_bracket(x: PolyVectorField, y: PolyVectorField, max_level=None):
    """``[X, Y]_i = sum_j (Y_j d_j X_i - X_j d_j Y_i)``, optionally truncated."""
    x._check(y)
    dim = x.dim
    max_wdeg = None
    comps = []
    for i in range(dim):
        if max_level is not None:
            max_wdeg = max_level + (1 if i < dim - 1 else 2)
        p = Poly.zero(dim)
        xi, yi = x.components[i], y.components[i]
        for j in range(dim):
            xj, yj = x.components[j], y.components[j]
            if not yj.is_zero():
                p = p + yj.mul(xi.diff(j), max_wdeg)
            if not xj.is_zero():
                p = p - xj.mul(yi.diff(j), max_wdeg)
        comps.append(p)
    return PolyVectorField(x.n, comps)


def grade_decompose(x: PolyVectorField):
    """Split into graded levels; the parts sum back to the input."""
    return {q: x.level_part(q) for q in x.levels()}


def i_of_k_matrix(k, n):
    """The matrix I(k) = diag(1/k * I_{2n}, 1/k^2)."""
    dim = 2 * n + 1
    m = [[QZERO] * dim for _ in range(dim)]
    for i in range(2 * n):
        m[i][i] = Q(1, 1) / Q(k)
    m[dim - 1][dim - 1] = Q(1) / (Q(k) * Q(k))
    return m


def pushforward_linear(matrix, x: PolyVectorField):
    """Pushforward of a field by an invertible linear map, exactly."""
    dim = x.dim
    inv = mat_inverse(matrix)
    lin_inv = [Poly(dim, {tuple(1 if t == j else 0 for t in range(dim)): inv[i][j]
                          for j in range(dim) if inv[i][j] != 0})
               for i in range(dim)]
    comps = []
    for i in range(dim):
        p = Poly.zero(dim)
        for j in range(dim):
            if matrix[i][j] != 0:
                p = p + x.components[j].scale(matrix[i][j])
        comps.append(p.subs(lin_inv))
    return PolyVectorField(x.n, comps)


# -- level-space enumeration -------------------------------------------------

def field_monomials_of_level(n, q):
    """Canonical basis labels ``(component, exponents)`` of the level-q space."""
    dim = 2 * n + 1
    out = []
    for i in range(dim):
        w = q + (1 if i < dim - 1 else 2)
        if w < 0:
            continue
        for e in monomials_of_weighted_degree(dim, w):
            out.append((i, e))
    return out


def field_basis_of_levels(n, levels):
    return [PolyVectorField.monomial_field(n, i, e)
            for q in levels for (i, e) in field_monomials_of_level(n, q)]


def field_coordinates(x: PolyVectorField):
    """Coordinates ``{(component, exponents): coeff}`` of a field."""
    return {key: c for key, c in x.term_items()}


# -- centralizers, Heisenberg structure, dilations ----------------------------

def centralizer(basis, max_level, n=None):
    """Basis of all fields of level <= max_level commuting with ``basis``.

    The bracket conditions over the unknown monomial coefficients form one
    exact linear system; the kernel is returned as fields in the canonical
    monomial order.
    """
    if n is None:
        if not basis:
            raise ValueError("empty basis needs an explicit dimension n")
        n = basis[0].n
    labels = [(q, i, e) for q in range(-2, max_level + 1)
              for (i, e) in field_monomials_of_level(n, q)]
    col_labels = [(i, e) for (_, i, e) in labels]
    # rows of the system, one per (basis element, target monomial)
    rows = []
    bracket_cols = {}
    for col, (i, e) in enumerate(col_labels):
        mono = PolyVectorField.monomial_field(n, i, e)
        bracket_cols[col] = [lie_bracket(b, mono) for b in basis]
    for bidx in range(len(basis)):
        row_entries = {}
        for col in bracket_cols:
            for key, c in bracket_cols[col][bidx].term_items():
                row_entries.setdefault((bidx,) + key, {})[col] = c
        rows.extend(row_entries.values())
    kernel = nullspace_sparse(rows, range(len(col_labels)))
    out = []
    for vec in kernel:
        terms = {col_labels[c]: v for c, v in vec.items()}
        out.append(PolyVectorField.from_terms(n, terms))
    return out


def verify_heisenberg(fields, algebra_elems, base_point=None):
    """Check that ``fields`` realize the Heisenberg algebra of ``algebra_elems``.

    ``algebra_elems`` are the claimed preimages in C^n x R (one
    ``HeisenbergAlgebraElement`` per field).  Returns ``(ok, witness)``
    where the witness names the first failing bracket pair, or carries the
    frame data on success.
    """
    from .heisenberg import algebra_bracket, algebra_coordinates
    if not fields:
        return False, {"reason": "no fields supplied"}
    n = fields[0].n
    dim = 2 * n + 1
    if len(fields) != dim or len(algebra_elems) != dim:
        return False, {"reason": "need exactly 2n+1 fields and elements"}
    coord_rows = [algebra_coordinates(el) for el in algebra_elems]
    # elements must form a basis of C^n x R
    if rank([list(r) for r in coord_rows]) != dim:
        return False, {"reason": "algebra elements are not a basis"}
    inv = mat_inverse(mat_transpose_local(coord_rows))
    for a in range(dim):
        for b in range(a + 1, dim):
            target = algebra_bracket(algebra_elems[a], algebra_elems[b])
            tcoords = mat_vec(inv, list(algebra_coordinates(target)))
            expected = PolyVectorField.zero(n)
            for j, c in enumerate(tcoords):
                if c != 0:
                    expected = expected + fields[j].scale(c)
            got = lie_bracket(fields[a], fields[b])
            if got != expected:
                return False, {"reason": "bracket mismatch", "pair": (a, b),
                               "got": field_to_obj(got),
                               "expected": field_to_obj(expected)}
    if base_point is None:
        base_point = [QZERO] * dim
    frame = [f.eval(base_point) for f in fields]
    det_ok = rank([list(r) for r in frame]) == dim
    if not det_ok:
        return False, {"reason": "fields degenerate at base point",
                       "point": [qstr(v) for v in base_point]}
    return True, {"frame_rank": dim}


def mat_transpose_local(a):
    return [list(col) for col in zip(*a)]


def find_dilation(basis, log_scale, center_index=None, n=None):
    """A field E with ``ad(E) = log_scale`` on the degree-1 part of the
    connection and ``2*log_scale`` on its center, and the same on the
    centralizer.

    ``basis`` lists 2n+1 fields spanning a Heisenberg connection, the last
    one central unless ``center_index`` says otherwise.  ``log_scale`` is
    the rational value of log(lambda); pass 0 for lambda = 1.  The solution
    is normalized to vanish at the origin when possible, which pins the
    standard answer ``log_scale * (x1 d1 + ... + 2 x_{2n+1} d_{2n+1})``.
    """
    if n is None:
        n = basis[0].n
    dim = 2 * n + 1
    if center_index is None:
        center_index = dim - 1
    s = Q(log_scale)
    z_basis = centralizer(basis, 0, n=n)
    labels = field_monomials_of_level(n, -2) + field_monomials_of_level(n, -1) \
        + field_monomials_of_level(n, 0)
    unknowns = {lab: j for j, lab in enumerate(labels)}
    monos = [PolyVectorField.monomial_field(n, i, e) for (i, e) in labels]

    rows = []
    rhs = []

    def add_equations(target_fields, weights):
        for f, w in zip(target_fields, weights):
            brackets = [lie_bracket(mono, f) for mono in monos]
            want = f.scale(w)
            keys = set()
            for b in brackets:
                keys.update(k for k, _ in b.term_items())
            keys.update(k for k, _ in want.term_items())
            for key in sorted(keys):
                rows.append([b.components[key[0]].coeff(key[1]) for b in brackets])
                rhs.append(want.components[key[0]].coeff(key[1]))

    deg1 = [f for j, f in enumerate(basis) if j != center_index]
    add_equations(deg1, [s] * len(deg1))
    add_equations([basis[center_index]], [2 * s])
    z_center = [f for f in z_basis]
    # the centralizer is itself a connection; grade it by bracketing
    z_deg1, z_cent = [], []
    for f in z_basis:
        if all(lie_bracket(f, g).is_zero() for g in z_basis):
            z_cent.append(f)
        else:
            z_deg1.append(f)
    add_equations(z_deg1, [s] * len(z_deg1))
    add_equations(z_cent, [2 * s] * len(z_cent))
    # prefer the representative vanishing at the origin
    origin = [QZERO] * dim
    rows_o = list(rows)
    rhs_o = list(rhs)
    for i in range(dim):
        rows_o.append([m.components[i].constant_term() for m in monos])
        rhs_o.append(QZERO)
    x = solve(rows_o, rhs_o)
    if x is None:
        x = solve(rows, rhs)
    if x is None:
        raise ValueError("basis does not admit a dilation: "
                         "brackets are not closed in the Heisenberg pattern")
    terms = {lab: x[j] for lab, j in unknowns.items() if x[j] != 0}
    return PolyVectorField.from_terms(n, terms)


# -- serialization -------------------------------------------------------------

def field_to_obj(x: PolyVectorField):
    """Canonical JSON form: term records sorted by component then monomial."""
    out = []
    for i, p in enumerate(x.components):
        for e, c in p.sorted_terms():
            out.append({"component": i + 1, "exponents": list(e),
                        "coeff": qstr(c)})
    return out


def field_from_obj(n, obj):
    from .scalars import qparse
    dim = 2 * n + 1
    terms = {}
    for rec in obj:
        i = int(rec["component"]) - 1
        if not 0 <= i < dim:
            raise ValueError("component index out of range")
        e = tuple(int(v) for v in rec["exponents"])
        c = qparse(rec["coeff"])
        key = (i, e)
        terms[key] = terms.get(key, QZERO) + c
    return PolyVectorField.from_terms(n, terms)
