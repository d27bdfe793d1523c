"""Sternberg-style normalization in P_r and the analytic-constant checkers.

``sternberg_normalize`` solves F o H = H o G with G the level-0 part of F,
degree by degree in the graded levels.  Each level gives an affine
equation for the unknown homogeneous part; its linear part is assembled
by probing the residual map on basis elements, so no symbolic operator
calculus is needed, and a singular level solve is reported instead of
presuming a closeness hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .jetgroup import (JetTransformation, jet_power,
                       transformation_monomials_of_level)
from .linalg import SparseSystem, nullspace
from .poly import weighted_degree
from .scalars import Q, QZERO


@dataclass
class NormalizationResult:
    """Conjugator H, normal form G = F^(0), and per-level solver data."""

    h: JetTransformation
    g: JetTransformation
    diagnostics: list = field(default_factory=list)


class SingularLevelSystem(ValueError):
    """A level solve came out singular; the level-0 data is too degenerate."""

    def __init__(self, level, message):
        super().__init__(message)
        self.level = level


def _jet_sub(a: JetTransformation, b: JetTransformation):
    return JetTransformation(a.n, a.r,
                             [p - q for p, q in zip(a.components, b.components)])


def _jet_add(a: JetTransformation, b: JetTransformation):
    return JetTransformation(a.n, a.r,
                             [p + q for p, q in zip(a.components, b.components)])


def _level_coeffs(jet: JetTransformation, q: int):
    out = {}
    part = jet.level_part(q)
    for i, p in enumerate(part.components):
        for e, c in p.terms.items():
            out[(i, e)] = c
    return out


def _column_order_key(label):
    # near-triangular elimination order: component group, then descending
    # power of the weight-2 variable, then the monomial itself
    i, e = label
    return (0 if i < len(e) - 1 else 1, -e[-1], i, e)


def sternberg_normalize(f: JetTransformation, basis_order=None) -> NormalizationResult:
    """The unique H with H^(0) = id, H^(-1) = 0 and F o H = H o F^(0).

    ``f`` must have no level -1 part (apply ``kill_level_minus_one``
    first) and invertible linear data.  ``basis_order`` optionally permutes
    the probe basis at every level; the solution is independent of it.
    Raises :class:`SingularLevelSystem` when a level operator is not
    invertible, naming the offending level.
    """
    if f.has_level_minus_one():
        raise ValueError("normalize needs a vanishing level -1 part; "
                         "apply kill_level_minus_one first")
    if not f.in_p_r():
        raise ValueError("jet has singular linear data")
    n, r = f.n, f.r
    g = f.p0_part()
    h = JetTransformation.identity(n, r)
    ident = JetTransformation.identity(n, r)
    diagnostics = []
    for q in range(1, r + 1):
        base = _level_coeffs(_jet_sub(f.compose(h), h.compose(g)), q)
        labels = transformation_monomials_of_level(n, q)
        if basis_order is not None:
            labels = basis_order(q, labels)
        residual_at_zero = _level_coeffs(_jet_sub(f.compose(ident),
                                                  ident.compose(g)), q)
        system = SparseSystem()
        for label in labels:
            probe = _jet_add(ident, JetTransformation.from_terms(
                n, r, {label: Q(1)}))
            col = _level_coeffs(_jet_sub(f.compose(probe), probe.compose(g)), q)
            for key, v in residual_at_zero.items():
                col[key] = col.get(key, QZERO) - v
            system.set_column(label, col)
        # elimination follows the probe order when one is imposed, so the
        # order-independence of the solution is a real property under test
        order = (sorted(labels, key=_column_order_key)
                 if basis_order is None else list(labels))
        try:
            sol = system.solve_unique({k: -v for k, v in base.items()},
                                      column_order=order)
        except ValueError as exc:
            raise SingularLevelSystem(
                q, f"level {q} system is singular: {exc}") from exc
        correction = JetTransformation.from_terms(
            n, r, {lab: c for lab, c in sol.items() if c != 0})
        h = _jet_add(h, correction)
        diagnostics.append({"level": q, "dimension": len(labels),
                            "nonzero": sum(1 for c in sol.values() if c != 0)})
    if f.compose(h) != h.compose(g):
        raise SingularLevelSystem(-1, "conjugacy residual is nonzero after solve")
    return NormalizationResult(h=h, g=g, diagnostics=diagnostics)


def operator_invertibility(a_block, b_scalar, q, n):
    """Invertibility of B -> L o B o L^{-1} - B on the level-q jet space.

    ``a_block`` is the 2n x 2n linear block and ``b_scalar`` the last
    diagonal entry of L.  Returns ``(invertible, kernel_basis)`` with the
    kernel as coefficient vectors over the canonical level basis.
    """
    dim = 2 * n + 1
    mat = [[QZERO] * dim for _ in range(dim)]
    for i in range(2 * n):
        for j in range(2 * n):
            mat[i][j] = Q(a_block[i][j])
    mat[dim - 1][dim - 1] = Q(b_scalar)
    l_jet = JetTransformation.from_linear(mat, n, max(q, 1))
    l_inv = l_jet.invert()
    labels = transformation_monomials_of_level(n, q)
    columns = []
    for label in labels:
        b = JetTransformation.from_terms(n, max(q, 1), {label: Q(1)})
        conj = _compose_plain(l_jet, _compose_plain(b, l_inv))
        col = _level_coeffs(conj, q)
        col[label] = col.get(label, QZERO) - 1
        columns.append(col)
    matrix = [[columns[j].get(lab, QZERO) for j in range(len(labels))]
              for lab in labels]
    kern = nullspace(matrix)
    return (len(kern) == 0, kern)


def _compose_plain(f, g):
    # composition without the group guards; used on homogeneous pieces
    cap = f.r + 2
    comps = [p.subs(list(g.components), max_wdeg=cap) for p in f.components]
    from .jetgroup import _trunc_components
    return JetTransformation(f.n, f.r, _trunc_components(f.n, f.r, comps))


def resonance_check(eigenvalues, max_degree) -> bool:
    """True iff no relation ``lambda_i = prod lambda_j^{l_j}`` exists
    with ``2 <= sum l_j <= max_degree`` (exhaustive, exact)."""
    eigs = [Q(v) for v in eigenvalues]
    for v in eigs:
        if abs(v) >= 1:
            raise ValueError("resonance check expects contracting eigenvalues")
    m = len(eigs)

    def exponents(total, slots):
        if slots == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in exponents(total - first, slots - 1):
                yield (first,) + rest

    for total in range(2, max_degree + 1):
        for exps in exponents(total, m):
            prod = Q(1)
            for v, l in zip(eigs, exps):
                if l:
                    prod = prod * v ** l
            if any(prod == v for v in eigs):
                return False
    return True


def reconstruct_from_low_order(low: JetTransformation, k, m, r,
                               given_max_level=None) -> JetTransformation:
    """Rebuild a jet from its low levels and the relation G o F = F^m o G.

    ``G = I(k)``.  At each missing level q the relation determines the
    homogeneous part through the diagonal coefficients
    ``k^{-w_i} - m k^{-w}`` on graded monomials, which vanish only when
    ``k^q = m``; for the standard exponents m = k (levels <= 1 given) and
    m = k^2 (levels <= 2 given) all remaining levels are determined.
    The result is verified against the relation exactly.
    """
    n = low.n
    if given_max_level is None:
        given = [q for q in low.levels() if q > 0]
        given_max_level = max(given) if given else 0
    start = given_max_level + 1
    f = low.lift(r) if low.r <= r else low.project(r)
    g = JetTransformation.i_of_k(k, n, r)
    kq = Q(k)
    for q in range(start, r + 1):
        res = _level_coeffs(_jet_sub(g.compose(f), jet_power(f, m).compose(g)), q)
        terms = {}
        for (i, e), c in res.items():
            w_i = 1 if i < 2 * n else 2
            denom = kq ** (-w_i) - Q(m) * kq ** (-weighted_degree(e))
            if denom == 0:
                raise SingularLevelSystem(
                    q, f"level {q} is not determined: k^q equals m")
            terms[(i, e)] = -c / denom
        f = _jet_add(f, JetTransformation.from_terms(n, r, terms))
    if g.compose(f) != jet_power(f, m).compose(g):
        raise SingularLevelSystem(-1, "reconstruction failed the relation")
    return f


# -- analytic-constant certificates ------------------------------------------------


@dataclass
class ContractionCertificate:
    """Constants witnessing the fixed-point norm inequality.

    For each generator gamma with relation exponent m_gamma the inequality
    ``-m^2 |u|_1 c1 + ((1 - eps) m - lambda) c2 > 0`` holds, and the
    operator norm of ``sum_{j<m} A_gamma^j`` in the weighted l1 norm
    ``c1 sum |x_i| + c2 |x_last|`` exceeds ``eps m + lambda`` exactly.
    """

    k: int
    lam: object
    eps: object
    c1: object
    c2: object
    u: dict
    norms: dict


def contraction_certificate(k, lam, eps, u: dict) -> ContractionCertificate:
    """Find and verify rational (c1, c2) for the given shear vectors.

    ``u`` maps generator names to their shear vectors in Q^{2n}; the
    relation exponent is k for b-generators and k^2 for c.
    """
    k = int(k)
    lam, eps = Q(lam), Q(eps)
    if not Q(1, k) < lam < 1:
        raise ValueError("need 1/k < lambda < 1")
    if not 0 < eps < Q(1, k * k):
        raise ValueError("need 0 < eps < 1/k^2")
    bound = None
    data = {}
    for name, vec in u.items():
        m = k * k if name == "c" else k
        u1 = sum((abs(Q(v)) for v in vec), QZERO)
        gap = (1 - eps) * m - lam
        if gap <= 0:
            raise ValueError("infeasible constants: (1 - eps) m <= lambda")
        data[name] = (m, u1, gap)
        if u1 != 0:
            cand = gap / (m * m * u1)
            bound = cand if bound is None else min(bound, cand)
    c2 = Q(1)
    c1 = Q(1) if bound is None else bound / 2
    norms = {}
    for name, (m, u1, gap) in data.items():
        if -m * m * u1 * c1 + gap * c2 <= 0:
            raise ValueError("certificate search failed the defining inequality")
        norms[name] = _power_sum_norm(u[name], m, c1, c2)
        if not norms[name] > eps * m + lam:
            raise ValueError("operator norm bound failed")
    return ContractionCertificate(k=k, lam=lam, eps=eps, c1=c1, c2=c2,
                                  u={g: tuple(Q(v) for v in vec)
                                     for g, vec in u.items()},
                                  norms=norms)


def _power_sum_norm(u_vec, m, c1, c2):
    """Exact norm of sum_{j<m} A^j on the unit-ball extreme points.

    ``A = [[I, u], [0, 1]]`` gives ``A^j = [[I, j u]]``, so the sum is
    ``[[m I, (m(m-1)/2) u], [0, m]]``.  For a polyhedral norm the operator
    norm is attained at the extreme points +-e_i / c1 and +-e_last / c2.
    """
    u_vec = [Q(v) for v in u_vec]
    msum = Q(m)
    shear = Q(m * (m - 1), 2)
    best = QZERO
    # extreme points e_i / c1: image m e_i / c1
    best = max(best, msum)
    # extreme point e_last / c2: image (shear * u, m) / c2
    u1 = sum((abs(v) for v in u_vec), QZERO)
    val = (c1 * shear * u1 + c2 * msum) / c2
    best = max(best, val)
    return best


def germ_constant_check(k, m, r0, c) -> bool:
    """Exact evaluation of ``m c^{r0 + 1} < k^{r0 - 2}``."""
    if m < 2 or k < 2 or r0 < 1:
        raise ValueError("need m >= 2, k >= 2, r0 >= 1")
    c = Q(c)
    if c <= 1:
        raise ValueError("need c > 1")
    return Q(m) * c ** (r0 + 1) < Q(k) ** (r0 - 2)
