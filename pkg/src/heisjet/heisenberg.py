"""The Heisenberg group C^n x R, its lattices, and word evaluation in AN.

Group law: ``(z, t) (z', t') = (z + z', t + t' - Phi(z, z'))`` with the
symplectic pairing ``Phi(z, z') = Im(conj(z')^T z)``.  The Lie algebra is
identified with the same coordinates; exp is the identity map and the
two-step BCH formula holds exactly.

A lattice presentation stores the integer data (m_ij, k) of

    < a, b_1..b_2n, c | a b_i a^-1 = b_i^k, a c a^-1 = c^{k^2},
      [b_i, b_j] = c^{m_ij} >

together with an exact rational basis xi_1..xi_2n realizing it, so words
in the generators can be evaluated faithfully in AN coordinates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .linalg import mat_inverse, mat_vec, rank
from .scalars import CQ, Q, QZERO, as_cq, cq_parse, cq_str, qparse, qstr


class HeisenbergElement:
    """A point (z, t) of N = C^n x R."""

    __slots__ = ("z", "t")

    def __init__(self, z, t):
        self.z = tuple(as_cq(v) for v in z)
        self.t = Q(t)

    @property
    def n(self):
        return len(self.z)

    @classmethod
    def identity(cls, n):
        return cls((CQ(0),) * n, 0)

    def __mul__(self, other):
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        z = tuple(a + b for a, b in zip(self.z, other.z))
        return HeisenbergElement(z, self.t + other.t - phi_pairing(self.z, other.z))

    def inverse(self):
        return HeisenbergElement(tuple(-v for v in self.z), -self.t)

    def power(self, m: int):
        if m < 0:
            return self.inverse().power(-m)
        acc = HeisenbergElement.identity(self.n)
        for _ in range(m):
            acc = acc * self
        return acc

    def __eq__(self, other):
        return (isinstance(other, HeisenbergElement)
                and self.z == other.z and self.t == other.t)

    def __hash__(self):
        return hash((self.z, self.t))

    def __repr__(self):
        return f"H({list(self.z)!r}, {self.t})"


class HeisenbergAlgebraElement:
    """An element (xi, tau) of the Heisenberg Lie algebra."""

    __slots__ = ("xi", "tau")

    def __init__(self, xi, tau):
        self.xi = tuple(as_cq(v) for v in xi)
        self.tau = Q(tau)

    @property
    def n(self):
        return len(self.xi)

    @classmethod
    def zero(cls, n):
        return cls((CQ(0),) * n, 0)

    def __add__(self, other):
        return HeisenbergAlgebraElement(
            tuple(a + b for a, b in zip(self.xi, other.xi)), self.tau + other.tau)

    def scale(self, c):
        c = Q(c)
        return HeisenbergAlgebraElement(tuple(v * CQ(c) for v in self.xi),
                                        c * self.tau)

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        return (isinstance(other, HeisenbergAlgebraElement)
                and self.xi == other.xi and self.tau == other.tau)

    def __hash__(self):
        return hash((self.xi, self.tau))

    def __repr__(self):
        return f"h({list(self.xi)!r}, {self.tau})"


def phi_pairing(z, zp):
    """``Phi(z, z') = Im(conj(z')^T z)``."""
    total = QZERO
    for a, b in zip(z, zp):
        total = total + (b.re * a.im - b.im * a.re)
    return total


def algebra_bracket(x: HeisenbergAlgebraElement, y: HeisenbergAlgebraElement):
    """``[(xi, tau), (xi', tau')] = (0, -2 Phi(xi, xi'))``."""
    return HeisenbergAlgebraElement((CQ(0),) * x.n,
                                    -2 * phi_pairing(x.xi, y.xi))


def algebra_exp(x: HeisenbergAlgebraElement) -> HeisenbergElement:
    """exp in the (xi, tau) coordinates; BCH at two steps holds exactly."""
    return HeisenbergElement(x.xi, x.tau)


def algebra_log(g: HeisenbergElement) -> HeisenbergAlgebraElement:
    return HeisenbergAlgebraElement(g.z, g.t)


def algebra_adjoint(g: HeisenbergElement, x: HeisenbergAlgebraElement):
    """``Ad((z, t))(xi, tau) = (xi, tau - 2 Phi(z, xi))``."""
    return HeisenbergAlgebraElement(x.xi, x.tau - 2 * phi_pairing(g.z, x.xi))


def a_scaling(x: HeisenbergAlgebraElement, k, power=1):
    """``Ad(a^p)(xi, tau) = (k^p xi, k^{2p} tau)``."""
    s = Q(k) ** power
    return HeisenbergAlgebraElement(tuple(v * CQ(s) for v in x.xi),
                                    s * s * x.tau)


def algebra_coordinates(x: HeisenbergAlgebraElement):
    """Real coordinates (Re xi_1, Im xi_1, ..., Re xi_n, Im xi_n, tau)."""
    out = []
    for v in x.xi:
        out.append(v.re)
        out.append(v.im)
    out.append(x.tau)
    return out


# -- lattice presentations ---------------------------------------------------

def multiplication_by_i_matrix(n):
    """Matrix of z -> i z on the basis (e_1, i e_1, ..., e_n, i e_n)."""
    m = [[QZERO] * (2 * n) for _ in range(2 * n)]
    for l in range(n):
        m[2 * l][2 * l + 1] = Q(-1)
        m[2 * l + 1][2 * l] = Q(1)
    return m


def pairing_matrix(n):
    """The bookkeeping matrix J with 2 G^T J G = tau M for lattice bases.

    This is the matrix of multiplication by -i.  With the bracket value
    ``[b_i, b_j] = c^{m_ij}`` forced by the group law, the Gram identity
    holds with this orientation; the commonly printed mult-by-i choice
    flips the sign of M and breaks the relators.
    """
    m = multiplication_by_i_matrix(n)
    return [[-v for v in row] for row in m]


def lattice_matrix_check(m) -> bool:
    """Membership in the realizable set: integer, skew-symmetric, det != 0.

    Over the reals every nondegenerate skew form is equivalent to the
    standard one, so these conditions characterize the matrices arising
    from lattices.
    """
    size = len(m)
    if size == 0 or size % 2 != 0:
        return False
    for row in m:
        if len(row) != size:
            return False
    for i in range(size):
        for j in range(size):
            v = m[i][j]
            if int(v) != v:
                return False
            if m[i][j] != -m[j][i]:
                return False
    return rank([[Q(v) for v in row] for row in m]) == size


def symplectic_basis(s):
    """Columns P with P^T S P equal to the standard pairing, over Q.

    ``s`` is a nondegenerate skew rational matrix; the standard pairing is
    ``pairing_matrix``'s block pattern with +1 in the (2l, 2l+1) slots.
    """
    size = len(s)
    s = [[Q(v) for v in row] for row in s]

    def pair(u, v):
        return sum((u[i] * sum((s[i][j] * v[j] for j in range(size)), QZERO)
                    for i in range(size)), QZERO)

    remaining = [[Q(1) if i == j else QZERO for j in range(size)]
                 for i in range(size)]
    pairs = []
    while remaining:
        v = remaining.pop(0)
        w = None
        for idx, cand in enumerate(remaining):
            p = pair(v, cand)
            if p != 0:
                w = [c / p for c in cand]
                remaining.pop(idx)
                break
        if w is None:
            raise ValueError("degenerate pairing; matrix not invertible")
        pairs.append((v, w))
        reduced = []
        for u in remaining:
            alpha = -pair(u, w)
            beta = pair(u, v)
            u2 = [ui + alpha * vi + beta * wi for ui, vi, wi in zip(u, v, w)]
            reduced.append(u2)
        remaining = reduced
    cols = []
    for v, w in pairs:
        cols.append(v)
        cols.append(w)
    # columns
    return [[cols[j][i] for j in range(size)] for i in range(size)]


@dataclass(frozen=True)
class LatticePresentation:
    """The integer presentation data plus an exact realizing basis."""

    n: int
    m: tuple
    k: int
    tau: object
    xi_basis: tuple

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if not lattice_matrix_check([list(r) for r in self.m]):
            raise ValueError("presentation matrix must be integer, "
                             "skew-symmetric and nondegenerate")
        g = self.basis_matrix()
        j = pairing_matrix(self.n)
        size = 2 * self.n
        # 2 G^T J G = tau M, checked entrywise
        gt_j_g = _triple_product(g, j)
        for i in range(size):
            for jj in range(size):
                if 2 * gt_j_g[i][jj] != Q(self.tau) * Q(self.m[i][jj]):
                    raise ValueError("basis does not realize the presentation "
                                     "matrix: 2 G^T J G != tau M")

    def basis_matrix(self):
        """Columns are the real coordinates of xi_1 .. xi_2n."""
        size = 2 * self.n
        g = [[QZERO] * size for _ in range(size)]
        for col, elem in enumerate(self.xi_basis):
            for l, v in enumerate(elem.xi):
                g[2 * l][col] = v.re
                g[2 * l + 1][col] = v.im
        return g

    def generator(self, name):
        """The AN value of a generator letter."""
        if name == "a":
            return ANElement(self.k, 1, HeisenbergElement.identity(self.n))
        if name == "c":
            return ANElement(self.k, 0,
                             algebra_exp(HeisenbergAlgebraElement(
                                 (CQ(0),) * self.n, self.tau)))
        mt = re.fullmatch(r"b(\d+)", name)
        if mt:
            i = int(mt.group(1))
            if not 1 <= i <= 2 * self.n:
                raise ValueError(f"generator index out of range: {name}")
            return ANElement(self.k, 0, algebra_exp(self.xi_basis[i - 1]))
        raise ValueError(f"unknown generator {name!r}")


def _triple_product(g, j):
    size = len(g)
    jg = [[sum((j[i][t] * g[t][col] for t in range(size)), QZERO)
           for col in range(size)] for i in range(size)]
    return [[sum((g[t][i] * jg[t][col] for t in range(size)), QZERO)
             for col in range(size)] for i in range(size)]


def build_lattice_embedding(m, tau, k) -> LatticePresentation:
    """Realize a presentation matrix by an exact rational basis.

    Returns xi_1..xi_2n with ``2 G^T J G = tau M``; the generators are
    ``b_i = exp(xi_i, 0)`` and ``c = exp(0, tau)``.  A rational basis
    always exists for nondegenerate skew M and nonzero rational tau.
    """
    if not lattice_matrix_check(m):
        raise ValueError("matrix is not integer, skew and nondegenerate")
    tau = Q(tau)
    if tau == 0:
        raise ValueError("tau must be nonzero")
    n = len(m) // 2
    target = [[tau * Q(v) / 2 for v in row] for row in m]
    p = symplectic_basis(target)
    g = mat_inverse(p)
    xi = []
    for col in range(2 * n):
        xi.append(HeisenbergAlgebraElement(
            tuple(CQ(g[2 * l][col], g[2 * l + 1][col]) for l in range(n)), 0))
    m_t = tuple(tuple(int(v) for v in row) for row in m)
    return LatticePresentation(n=n, m=m_t, k=int(k), tau=tau, xi_basis=tuple(xi))


def standard_lattice(n, k, tau=2) -> LatticePresentation:
    """The lattice with basis (e_1, i e_1, ..., e_n, i e_n)."""
    j = pairing_matrix(n)
    m = [[int(2 * v / Q(tau)) for v in row] for row in j]
    # for the standard basis G = I the Gram identity forces M = (2/tau) J
    for row, jrow in zip(m, j):
        for v, jv in zip(row, jrow):
            if Q(v) * Q(tau) != 2 * jv:
                raise ValueError("tau must divide 2 J integrally; "
                                 "use build_lattice_embedding instead")
    xi = []
    for col in range(2 * n):
        l, im = divmod(col, 2)
        xi.append(HeisenbergAlgebraElement(
            tuple(CQ(0, 1) if (t == l and im) else (CQ(1) if t == l else CQ(0))
                  for t in range(n)), 0))
    return LatticePresentation(n=n, m=tuple(tuple(r) for r in m), k=int(k),
                               tau=Q(tau), xi_basis=tuple(xi))


# -- the ambient group AN ------------------------------------------------------

class ANElement:
    """An element ``(z, t) a^p`` of AN in exact coordinates."""

    __slots__ = ("k", "p", "point")

    def __init__(self, k, p, point):
        self.k = int(k)
        self.p = int(p)
        self.point = point

    @classmethod
    def identity(cls, k, n):
        return cls(k, 0, HeisenbergElement.identity(n))

    def __mul__(self, other):
        if self.k != other.k:
            raise ValueError("mixed scaling constants")
        s = Q(self.k) ** self.p
        scaled = HeisenbergElement(tuple(v * CQ(s) for v in other.point.z),
                                   s * s * other.point.t)
        return ANElement(self.k, self.p + other.p, self.point * scaled)

    def inverse(self):
        s = Q(self.k) ** (-self.p)
        inv = self.point.inverse()
        scaled = HeisenbergElement(tuple(v * CQ(s) for v in inv.z),
                                   s * s * inv.t)
        return ANElement(self.k, -self.p, scaled)

    def power(self, m: int):
        if m < 0:
            return self.inverse().power(-m)
        acc = ANElement.identity(self.k, self.point.n)
        base = self
        while m:
            if m & 1:
                acc = acc * base
            m >>= 1
            if m:
                base = base * base
        return acc

    def is_identity(self):
        return self.p == 0 and all(v.is_zero() for v in self.point.z) \
            and self.point.t == 0

    def __eq__(self, other):
        return (isinstance(other, ANElement) and self.k == other.k
                and self.p == other.p and self.point == other.point)

    def __hash__(self):
        return hash((self.k, self.p, self.point))

    def __repr__(self):
        return f"AN(p={self.p}, {self.point!r})"


# -- words ---------------------------------------------------------------------

_TOKEN = re.compile(r"(a|c|b(\d+))(\^(-?\d+))?$")


@dataclass(frozen=True)
class GroupWord:
    """A word in the generators a, b_1..b_2n, c and their powers."""

    letters: tuple  # of (kind, index, exponent); index 0 for a and c

    @classmethod
    def parse(cls, text):
        """Parse whitespace-separated tokens like ``a b1^-1 c^2``."""
        if isinstance(text, (list, tuple)):
            tokens = list(text)
        else:
            tokens = text.split()
        letters = []
        for tok in tokens:
            mt = _TOKEN.fullmatch(tok.strip())
            if not mt:
                raise ValueError(f"bad word token {tok!r}")
            kind = mt.group(1)[0]
            idx = int(mt.group(2)) if mt.group(2) else 0
            exp = int(mt.group(4)) if mt.group(4) else 1
            if exp != 0:
                letters.append((kind, idx, exp))
        return cls(tuple(letters))

    def inverse(self):
        return GroupWord(tuple((k, i, -e) for k, i, e in reversed(self.letters)))

    def __mul__(self, other):
        return GroupWord(self.letters + other.letters)

    def tokens(self):
        out = []
        for kind, idx, exp in self.letters:
            name = kind if kind != "b" else f"b{idx}"
            out.append(name if exp == 1 else f"{name}^{exp}")
        return out

    def __str__(self):
        return " ".join(self.tokens()) if self.letters else "<empty>"


def commutator_word(x: GroupWord, y: GroupWord) -> GroupWord:
    return x * y * x.inverse() * y.inverse()


def evaluate_word(word: GroupWord, lat: LatticePresentation) -> ANElement:
    """Faithful evaluation in AN; two words agree in the group iff the
    evaluations agree."""
    acc = ANElement.identity(lat.k, lat.n)
    for kind, idx, exp in word.letters:
        name = kind if kind != "b" else f"b{idx}"
        if idx and not 1 <= idx <= 2 * lat.n:
            raise ValueError(f"generator index out of range: {name}")
        acc = acc * lat.generator(name).power(exp)
    return acc


def presentation_relators(lat: LatticePresentation):
    """All relator words of the presentation, labelled."""
    out = []
    k = lat.k
    for i in range(1, 2 * lat.n + 1):
        w = GroupWord.parse(f"a b{i} a^-1 b{i}^{-k}")
        out.append((f"a b{i} a^-1 = b{i}^{k}", w))
    out.append((f"a c a^-1 = c^{k * k}", GroupWord.parse(f"a c a^-1 c^{-k * k}")))
    for i in range(1, 2 * lat.n + 1):
        for j in range(i + 1, 2 * lat.n + 1):
            mij = lat.m[i - 1][j - 1]
            w = commutator_word(GroupWord.parse(f"b{i}"), GroupWord.parse(f"b{j}"))
            if mij:
                w = w * GroupWord.parse(f"c^{-mij}")
            out.append((f"[b{i}, b{j}] = c^{mij}", w))
    return out


# -- extension of lattice homomorphisms into Q_r --------------------------------

class LatticeHom:
    """A homomorphism of the lattice into Q_r, in exp/log coordinates.

    ``gen_logs[i]`` is log of the image of b_{i+1} and ``center_log`` the
    log of the image of c; both are polynomial vector fields with levels
    in [1, r].  The defining property, checked on construction, is the
    Lie-algebra homomorphism property with brackets truncated at level r.
    """

    def __init__(self, lat: LatticePresentation, r: int, gen_logs, center_log):
        from .jetgroup import q_r_bracket
        self.lat = lat
        self.r = r
        self.gen_logs = list(gen_logs)
        self.center_log = center_log
        m = lat.m
        for i in range(2 * lat.n):
            for j in range(i + 1, 2 * lat.n):
                got = q_r_bracket(self.gen_logs[i], self.gen_logs[j], r)
                want = center_log.scale(m[i][j])
                if got != want:
                    raise ValueError(
                        f"not a homomorphism: [log f(b{i + 1}), log f(b{j + 1})]"
                        f" != m_{i + 1}{j + 1} log f(c)")
        for i in range(2 * lat.n):
            if not q_r_bracket(self.gen_logs[i], center_log, r).is_zero():
                raise ValueError(
                    f"not a homomorphism: [log f(b{i + 1}), log f(c)] != 0")

    def algebra_image(self, x: HeisenbergAlgebraElement):
        """The induced Lie algebra map n -> q_r."""
        from .fields import PolyVectorField
        lat = self.lat
        g = lat.basis_matrix()
        coords = []
        for v in x.xi:
            coords.append(v.re)
            coords.append(v.im)
        a = mat_vec(mat_inverse(g), coords)
        out = PolyVectorField.zero(lat.n)
        for ai, d in zip(a, self.gen_logs):
            if ai != 0:
                out = out + d.scale(ai)
        b = x.tau / Q(lat.tau)
        if b != 0:
            out = out + self.center_log.scale(b)
        return out

    def group_image(self, g: HeisenbergElement):
        """The extended homomorphism N -> Q_r, via exp o phi o log."""
        from .jetgroup import jet_exp
        return jet_exp(self.algebra_image(algebra_log(g)), self.r)


def extend_lattice_hom(images: dict, lat: LatticePresentation, r=None) -> LatticeHom:
    """Extend generator images in Q_r to the whole group, via logs.

    ``images`` maps generator names ("b1", ..., "c") to jets in Q_r.
    Raises ``ValueError`` when the logs fail the homomorphism property,
    which signals that the images do not come from a homomorphism of the
    lattice.
    """
    from .jetgroup import JetTransformation, jet_log
    names = [f"b{i}" for i in range(1, 2 * lat.n + 1)] + ["c"]
    for name in names:
        if name not in images:
            raise ValueError(f"missing generator image {name!r}")
    jets = [images[name] for name in names]
    if r is None:
        r = jets[0].r
    for jet in jets:
        if jet.r != r:
            raise ValueError("generator images have mixed truncation orders")
        if jet.p0_part() != JetTransformation.identity(lat.n, r).p0_part():
            raise ValueError("generator images must lie in Q_r "
                             "(identity level-0 part)")
    logs = [jet_log(j) for j in jets]
    return LatticeHom(lat, r, logs[:-1], logs[-1])


# -- serialization ----------------------------------------------------------------

def word_to_obj(word: GroupWord):
    return word.tokens()


def word_from_obj(obj) -> GroupWord:
    return GroupWord.parse(obj)


def lattice_to_obj(lat: LatticePresentation):
    return {"n": lat.n, "m": [list(r) for r in lat.m], "k": lat.k,
            "tau": qstr(lat.tau),
            "xi_basis": [[cq_str(v) for v in el.xi] for el in lat.xi_basis]}


def lattice_from_obj(obj) -> LatticePresentation:
    n = int(obj["n"])
    tau = qparse(obj["tau"])
    if "xi_basis" in obj:
        xi = tuple(HeisenbergAlgebraElement(
            tuple(cq_parse(p) for p in row), 0) for row in obj["xi_basis"])
        m = tuple(tuple(int(v) for v in row) for row in obj["m"])
        return LatticePresentation(n=n, m=m, k=int(obj["k"]), tau=tau, xi_basis=xi)
    return build_lattice_embedding(obj["m"], tau, int(obj["k"]))


def an_to_obj(el: ANElement):
    return {"k": el.k, "p": el.p,
            "z": [cq_str(v) for v in el.point.z], "t": qstr(el.point.t)}


def an_from_obj(obj) -> ANElement:
    pt = HeisenbergElement(tuple(cq_parse(v) for v in obj["z"]),
                           qparse(obj["t"]))
    return ANElement(int(obj["k"]), int(obj["p"]), pt)
