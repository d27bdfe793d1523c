"""su(n+1,1) with its gradation, and the boundary-chart realizations.

Matrices are (n+2) x (n+2) over the Gaussian rationals, preserving the
Hermitian form ``<z, w> = z_0 conj(w_{n+1}) + sum z_i conj(w_i)
+ z_{n+1} conj(w_0)`` (antidiagonal identity blocks).  The grading element
E = diag(1, 0, ..., 0, -1) splits the algebra into ad(E)-eigenvalues
-2..+2 by block position.

The chart around the contracting fixed point p0 = [1, 0, ..., 0] sends a
boundary point to (Re z_1, Im z_1, ..., Re z_n, Im z_n, Im z_{n+1}) after
normalizing the first homogeneous coordinate; the light-cone lift fixes
Re z_{n+1} = -|z|^2 / 2.  All chart computations below are symbolic and
exact: vector fields come from a nilpotent infinitesimal (t^2 = 0) and
jets from a truncated geometric series for the projective denominator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import PolyVectorField, lie_bracket
from .heisenberg import GroupWord, LatticePresentation
from .jetgroup import JetTransformation, _trunc_components
from .poly import CPoly, Poly
from .scalars import CQ, CQ_ONE, Q, QZERO, as_cq


# -- complex rational matrices -------------------------------------------------

def cmat(rows):
    return tuple(tuple(as_cq(v) for v in row) for row in rows)


def czeros(size):
    return tuple((CQ(0),) * size for _ in range(size))


def cmat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def cmat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def cmat_scale(a, c):
    c = as_cq(c)
    return tuple(tuple(x * c for x in row) for row in a)


def cmat_mul(a, b):
    size = len(a)
    return tuple(tuple(sum((a[i][t] * b[t][j] for t in range(size)), CQ(0))
                       for j in range(size)) for i in range(size))


def cmat_commutator(a, b):
    return cmat_sub(cmat_mul(a, b), cmat_mul(b, a))


def cmat_conj_transpose(a):
    size = len(a)
    return tuple(tuple(a[j][i].conj() for j in range(size)) for i in range(size))


def cmat_trace(a):
    return sum((a[i][i] for i in range(len(a))), CQ(0))


def cmat_is_zero(a):
    return all(v.is_zero() for row in a for v in row)


def cmat_eq(a, b):
    return cmat_is_zero(cmat_sub(a, b))


def hermitian_form(n):
    size = n + 2
    h = [[CQ(0)] * size for _ in range(size)]
    h[0][size - 1] = CQ(1)
    h[size - 1][0] = CQ(1)
    for i in range(1, n + 1):
        h[i][i] = CQ(1)
    return cmat(h)


def in_su(x, n) -> bool:
    """Membership in su(n+1,1): X* H + H X = 0 and trace X = 0."""
    h = hermitian_form(n)
    lhs = cmat_add(cmat_mul(cmat_conj_transpose(x), h), cmat_mul(h, x))
    return cmat_is_zero(lhs) and cmat_trace(x).is_zero()


# -- graded generators ------------------------------------------------------------

def gen_e(n):
    size = n + 2
    m = [[CQ(0)] * size for _ in range(size)]
    m[0][0] = CQ(1)
    m[size - 1][size - 1] = CQ(-1)
    return cmat(m)


def gen_f_minus(n, tau=1):
    size = n + 2
    m = [[CQ(0)] * size for _ in range(size)]
    m[size - 1][0] = CQ(0, -Q(tau))
    return cmat(m)


def gen_f_plus(n, tau=1):
    size = n + 2
    m = [[CQ(0)] * size for _ in range(size)]
    m[0][size - 1] = CQ(0, -Q(tau))
    return cmat(m)


def gen_xi_minus(xi, n):
    size = n + 2
    xi = [as_cq(v) for v in xi]
    m = [[CQ(0)] * size for _ in range(size)]
    for j in range(n):
        m[j + 1][0] = xi[j]
        m[size - 1][j + 1] = -xi[j].conj()
    return cmat(m)


def gen_xi_plus(xi, n):
    size = n + 2
    xi = [as_cq(v) for v in xi]
    m = [[CQ(0)] * size for _ in range(size)]
    for j in range(n):
        m[0][j + 1] = -xi[j].conj()
        m[j + 1][size - 1] = xi[j]
    return cmat(m)


def gen_u0(z, u, n):
    """diag(z, U, -conj(z)) with U anti-Hermitian and z - conj(z) + tr U = 0."""
    size = n + 2
    z = as_cq(z)
    m = [[CQ(0)] * size for _ in range(size)]
    m[0][0] = z
    m[size - 1][size - 1] = -z.conj()
    for i in range(n):
        for j in range(n):
            m[i + 1][j + 1] = as_cq(u[i][j])
    out = cmat(m)
    if not in_su(out, n):
        raise ValueError("u0 data violates the su(n+1,1) constraints")
    return out


def basis_xi(l, n):
    """The l-th real basis vector of C^n: e_j for even l, i e_j for odd."""
    j, im = divmod(l, 2)
    return tuple(CQ(0, 1) if (t == j and im) else (CQ(1) if (t == j and not im)
                 else CQ(0)) for t in range(n))


def su_basis(n):
    """Ordered basis of su(n+1,1) as (key, matrix) pairs."""
    out = [(("E",), gen_e(n)), (("F+",), gen_f_plus(n)), (("F-",), gen_f_minus(n))]
    for l in range(2 * n):
        out.append((("xi+", l), gen_xi_plus(basis_xi(l, n), n)))
    for l in range(2 * n):
        out.append((("xi-", l), gen_xi_minus(basis_xi(l, n), n)))
    for m, (u, z) in enumerate(_u0_data(n)):
        out.append((("u0", m), gen_u0(z, u, n)))
    return out


def _u0_data(n):
    """u(n)-basis data with the matching z: i E_jj, E_jl - E_lj, i(E_jl + E_lj)."""
    out = []
    for j in range(n):
        u = [[CQ(0)] * n for _ in range(n)]
        u[j][j] = CQ(0, 1)
        out.append((u, CQ(0, Q(-1, 2))))
    for j in range(n):
        for l in range(j + 1, n):
            u = [[CQ(0)] * n for _ in range(n)]
            u[j][l] = CQ(1)
            u[l][j] = CQ(-1)
            out.append((u, CQ(0)))
            u2 = [[CQ(0)] * n for _ in range(n)]
            u2[j][l] = CQ(0, 1)
            u2[l][j] = CQ(0, 1)
            out.append((u2, CQ(0)))
    return out


def grade_of(x, n):
    """ad(E)-eigendecomposition by block position; the parts sum to x."""
    size = n + 2
    weight = [1] + [0] * n + [-1]
    parts = {}
    for a in range(size):
        for b in range(size):
            if x[a][b].is_zero():
                continue
            lam = weight[a] - weight[b]
            part = parts.setdefault(lam, [[CQ(0)] * size for _ in range(size)])
            part[a][b] = x[a][b]
    return {lam: cmat(m) for lam, m in sorted(parts.items())}


def g_coordinates(x, n):
    """Coordinates of x in the su_basis keys; exact, raises off the algebra."""
    if not in_su(x, n):
        raise ValueError("matrix is not in su(n+1,1)")
    size = n + 2
    coords = {}
    fp = x[0][size - 1]
    if not fp.is_zero():
        coords[("F+",)] = fp.im * -1  # entry is -i tau
    fm = x[size - 1][0]
    if not fm.is_zero():
        coords[("F-",)] = fm.im * -1
    for l in range(2 * n):
        j, im = divmod(l, 2)
        vp = x[j + 1][size - 1]
        vm = x[j + 1][0]
        cp = vp.im if im else vp.re
        cm = vm.im if im else vm.re
        if cp != 0:
            coords[("xi+", l)] = cp
        if cm != 0:
            coords[("xi-", l)] = cm
    z = x[0][0]
    if z.re != 0:
        coords[("E",)] = z.re
    for m, (u, _zm) in enumerate(_u0_data(n)):
        # inner coefficient against the u(n) basis element
        c = QZERO
        for j in range(n):
            for l in range(n):
                if not as_cq(u[j][l]).is_zero():
                    entry = x[j + 1][l + 1]
                    ub = as_cq(u[j][l])
                    # basis entries are unit real or imaginary
                    c = entry.im if ub.im != 0 else entry.re
                    c = c / (ub.im if ub.im != 0 else ub.re)
                    break
            else:
                continue
            break
        if c != 0:
            coords[("u0", m)] = c
    # exactness guard: reconstruct
    recon = czeros(size)
    for key, mat in su_basis(n):
        if key in coords:
            recon = cmat_add(recon, cmat_scale(mat, CQ(coords[key])))
    if not cmat_eq(recon, x):
        raise ValueError("coordinate extraction failed; matrix outside the basis span")
    return coords


def bracket_relation_table(n):
    """Exact check of the displayed commutator relations; returns a report.

    Relations: [xi+, eta+] = 2 Im(conj(xi)^T eta) F+, the minus version,
    [F-, xi+] = (i xi)-, [F+, xi-] = (i xi)+, [F-, F+] = E, and the derived
    identities xi- = [F-, (-i xi)+] and 2 F- = ad(F-)^2 F+.
    """
    cases = []
    fp, fm, e = gen_f_plus(n), gen_f_minus(n), gen_e(n)

    def imag_pair(xi, eta):
        # 2 Im(conj(xi)^T eta)
        total = QZERO
        for a, b in zip(xi, eta):
            total = total + (a.conj() * b).im
        return 2 * total

    vecs = [basis_xi(l, n) for l in range(2 * n)]
    for li, xi in enumerate(vecs):
        for lj, eta in enumerate(vecs):
            got = cmat_commutator(gen_xi_plus(xi, n), gen_xi_plus(eta, n))
            want = cmat_scale(fp, CQ(imag_pair(xi, eta)))
            cases.append((f"[xi+({li}), xi+({lj})] = 2 Im(..) F+",
                          cmat_eq(got, want)))
            got = cmat_commutator(gen_xi_minus(xi, n), gen_xi_minus(eta, n))
            want = cmat_scale(fm, CQ(imag_pair(xi, eta)))
            cases.append((f"[xi-({li}), xi-({lj})] = 2 Im(..) F-",
                          cmat_eq(got, want)))
    for li, xi in enumerate(vecs):
        ixi = tuple(v * CQ(0, 1) for v in xi)
        cases.append((f"[F-, xi+({li})] = (i xi)-",
                      cmat_eq(cmat_commutator(fm, gen_xi_plus(xi, n)),
                              gen_xi_minus(ixi, n))))
        cases.append((f"[F+, xi-({li})] = (i xi)+",
                      cmat_eq(cmat_commutator(fp, gen_xi_minus(xi, n)),
                              gen_xi_plus(ixi, n))))
        nixi = tuple(v * CQ(0, -1) for v in xi)
        cases.append((f"xi-({li}) = [F-, (-i xi)+]",
                      cmat_eq(gen_xi_minus(xi, n),
                              cmat_commutator(fm, gen_xi_plus(nixi, n)))))
    cases.append(("[F-, F+] = E", cmat_eq(cmat_commutator(fm, fp), e)))
    cases.append(("2 F- = ad(F-)^2 F+",
                  cmat_eq(cmat_scale(fm, CQ(2)),
                          cmat_commutator(fm, cmat_commutator(fm, fp)))))
    return cases


# -- the chart realization iota0 ---------------------------------------------------

def _phi_lift(n):
    """The light-cone lift of the phi-chart coordinates, as CPoly entries."""
    dim = 2 * n + 1
    lift = [CPoly.constant(dim, 1)]
    for j in range(n):
        lift.append(CPoly(Poly.variable(dim, 2 * j), Poly.variable(dim, 2 * j + 1)))
    norm = Poly.zero(dim)
    for t in range(2 * n):
        v = Poly.variable(dim, t)
        norm = norm + v * v
    lift.append(CPoly(norm.scale(Q(-1, 2)), Poly.variable(dim, dim - 1)))
    return lift


def _matrix_infinitesimal_field(x, n):
    dim = 2 * n + 1
    lift = _phi_lift(n)
    size = n + 2
    w = []
    for a in range(size):
        acc = CPoly.zero(dim)
        for b in range(size):
            if not x[a][b].is_zero():
                acc = acc + lift[b].cscale(x[a][b])
        w.append(acc)
    comps = []
    for j in range(1, n + 1):
        v = w[j] - w[0].mul(lift[j])
        comps.append(v.re)
        comps.append(v.im)
    v_last = w[n + 1] - w[0].mul(lift[n + 1])
    comps.append(v_last.im)
    return PolyVectorField(n, comps)


def induced_vector_field(x, n) -> PolyVectorField:
    """The chart realization of X in su(n+1,1) as a polynomial field.

    Computed symbolically: lift to the light cone, apply I + tX with a
    nilpotent t, renormalize the first homogeneous coordinate by an exact
    first-order geometric series, push through the chart, and take the
    t-coefficient.  Grade compatibility (level lambda for X in the
    lambda-eigenspace) is asserted per graded part.
    """
    if not in_su(x, n):
        raise ValueError("matrix is not in su(n+1,1)")
    total = PolyVectorField.zero(n)
    for lam, part in grade_of(x, n).items():
        field = _matrix_infinitesimal_field(part, n)
        if field.levels() not in ([], [lam]):
            raise ValueError(f"graded part {lam} produced levels {field.levels()}; "
                             "lift or normalization is inconsistent")
        total = total + field
    return total


def verify_homomorphism(n) -> bool:
    """iota0[X, Y] = [iota0 X, iota0 Y] over the full basis, exactly."""
    basis = su_basis(n)
    fields = {key: induced_vector_field(mat, n) for key, mat in basis}
    for key_x, mat_x in basis:
        for key_y, mat_y in basis:
            lhs = induced_vector_field(cmat_commutator(mat_x, mat_y), n)
            rhs = lie_bracket(fields[key_x], fields[key_y])
            if lhs != rhs:
                return False
    return True


# -- word matrices and chart jets -----------------------------------------------------

def heisenberg_matrix(z, t, n):
    """The upper-triangular N-matrix of the group element (z, t)."""
    size = n + 2
    z = [as_cq(v) for v in z]
    m = [[CQ(0)] * size for _ in range(size)]
    m[0][0] = CQ(1)
    m[size - 1][size - 1] = CQ(1)
    norm = sum((v.norm2() for v in z), QZERO)
    m[0][size - 1] = CQ(-norm / 2, -Q(t))
    for j in range(n):
        m[0][j + 1] = -z[j].conj()
        m[j + 1][j + 1] = CQ(1)
        m[j + 1][size - 1] = z[j]
    return cmat(m)


def a_matrix(k, n, power=1):
    size = n + 2
    m = [[CQ(0)] * size for _ in range(size)]
    s = Q(k) ** power
    m[0][0] = CQ(s)
    m[size - 1][size - 1] = CQ(Q(1) / s)
    for j in range(n):
        m[j + 1][j + 1] = CQ(1)
    return cmat(m)


def letter_matrix(kind, idx, exp, lat: LatticePresentation):
    n = lat.n
    if kind == "a":
        return a_matrix(lat.k, n, exp)
    if kind == "c":
        return heisenberg_matrix((CQ(0),) * n, Q(lat.tau) * exp, n)
    xi = lat.xi_basis[idx - 1].xi
    return heisenberg_matrix(tuple(v * CQ(exp) for v in xi), 0, n)


def word_matrix(word: GroupWord, lat: LatticePresentation):
    n = lat.n
    size = n + 2
    acc = cmat([[1 if i == j else 0 for j in range(size)] for i in range(size)])
    for kind, idx, exp in word.letters:
        acc = cmat_mul(acc, letter_matrix(kind, idx, exp, lat))
    return acc


def matrix_chart_jet(g, n, r) -> JetTransformation:
    """The jet at the origin of the phi-chart action of a group matrix."""
    dim = 2 * n + 1
    size = n + 2
    lift = _phi_lift(n)
    cap = r + 2
    w = []
    for a in range(size):
        acc = CPoly.zero(dim)
        for b in range(size):
            if not g[a][b].is_zero():
                acc = acc + lift[b].cscale(g[a][b])
        w.append(acc.wtrunc(cap))
    c0 = w[0].constant_term()
    if c0.is_zero():
        raise ValueError("chart denominator vanishes at the origin")
    u = w[0].cscale(CQ_ONE / c0) - CPoly.constant(dim, 1)
    # 1/(1+u) by the truncated geometric series; u has weighted order >= 1
    inv = CPoly.constant(dim, 1)
    term = CPoly.constant(dim, 1)
    for _ in range(cap):
        term = term.mul(u, cap).cscale(CQ(-1))
        if term.is_zero():
            break
        inv = inv + term
    inv = inv.cscale(CQ_ONE / c0)
    comps = []
    for j in range(1, n + 1):
        y = w[j].mul(inv, cap)
        comps.append(y.re)
        comps.append(y.im)
    y_last = w[n + 1].mul(inv, cap)
    comps.append(y_last.im)
    for p in comps:
        if p.constant_term() != 0:
            raise ValueError("group element does not fix the chart origin")
    return JetTransformation(n, r, _trunc_components(n, r, comps))


def phi_chart_jet(word: GroupWord, lat: LatticePresentation, r) -> JetTransformation:
    """Taylor jet of the word's action in the chart at the fixed point."""
    return matrix_chart_jet(word_matrix(word, lat), lat.n, r)


# -- the chart at the expanding fixed point -------------------------------------------

@dataclass(frozen=True)
class AffineChartMap:
    """An exact affine map (x0, x) -> M (x0, x) + shift on R x R^{2n}."""

    matrix: tuple
    shift: tuple

    def apply(self, point):
        point = [Q(v) for v in point]
        return [sum((row[j] * point[j] for j in range(len(point))), QZERO) + s
                for row, s in zip(self.matrix, self.shift)]

    def compose(self, other):
        size = len(self.shift)
        m = [[sum((self.matrix[i][t] * other.matrix[t][j] for t in range(size)),
                  QZERO) for j in range(size)] for i in range(size)]
        s = [sum((self.matrix[i][t] * other.shift[t] for t in range(size)), QZERO)
             + self.shift[i] for i in range(size)]
        return AffineChartMap(tuple(tuple(r) for r in m), tuple(s))

    def is_identity(self):
        size = len(self.shift)
        return all(self.shift[i] == 0 for i in range(size)) and \
            all(self.matrix[i][j] == (1 if i == j else 0)
                for i in range(size) for j in range(size))


@dataclass(frozen=True)
class ChartAffineData:
    """The (u_i, v_i, t) data of the generator actions in the far chart."""

    u: tuple  # 2n vectors in Q^{2n}
    v: tuple  # 2n vectors in Q^{2n}
    t: object


def _psi_lift(n):
    """Lift for the chart at the expanding point; variable 2n is x0."""
    dim = 2 * n + 1
    norm = Poly.zero(dim)
    for t in range(2 * n):
        v = Poly.variable(dim, t)
        norm = norm + v * v
    z0 = CPoly(norm.scale(Q(-1, 2)), Poly.variable(dim, dim - 1))
    lift = [z0]
    for j in range(n):
        lift.append(CPoly(Poly.variable(dim, 2 * j), Poly.variable(dim, 2 * j + 1)))
    lift.append(CPoly.constant(dim, 1))
    return lift


def psi_chart_action(word: GroupWord, lat: LatticePresentation):
    """The exact affine action of an AN word in the far chart.

    Returns ``(AffineChartMap, ChartAffineData | None)``; the data part is
    filled for single-generator words, where the map must have the affine
    translation shape with the scaling (k^2 x0, k x) for ``a``.
    """
    n = lat.n
    dim = 2 * n + 1
    g = word_matrix(word, lat)
    lift = _psi_lift(n)
    size = n + 2
    w = []
    for a in range(size):
        acc = CPoly.zero(dim)
        for b in range(size):
            if not g[a][b].is_zero():
                acc = acc + lift[b].cscale(g[a][b])
        w.append(acc)
    denom = w[size - 1]
    if not (denom - CPoly.constant(dim, 1)).is_zero():
        c = denom.constant_term()
        if (denom - CPoly.constant(dim, 1).cscale(c)).is_zero() and not c.is_zero():
            w = [wa.cscale(CQ_ONE / c) for wa in w]
        else:
            raise ValueError("word does not act affinely in the far chart")
    out_polys = [w[0].im] + [p for j in range(1, n + 1)
                             for p in (w[j].re, w[j].im)]
    for p in out_polys:
        if p.max_total_degree() > 1:
            raise ValueError("word does not act affinely in the far chart")
    # light-cone consistency: Re z0' = -|z'|^2 / 2 identically
    norm = Poly.zero(dim)
    for j in range(1, n + 1):
        norm = norm + w[j].re * w[j].re + w[j].im * w[j].im
    if not (w[0].re + norm.scale(Q(1, 2))).is_zero():
        raise ValueError("far-chart action left the light cone")
    # assemble rows over (x0, x1, ..., x2n); internal variable 2n is x0
    var_order = [dim - 1] + list(range(2 * n))
    matrix = []
    shift = []
    for p in out_polys:
        row = []
        for v in var_order:
            e = tuple(1 if t == v else 0 for t in range(dim))
            row.append(p.coeff(e))
        matrix.append(tuple(row))
        shift.append(p.constant_term())
    amap = AffineChartMap(tuple(matrix), tuple(shift))
    data = None
    if len(word.letters) == 1:
        data = _generator_shape_check(word.letters[0], amap, lat)
    return amap, data


def _generator_shape_check(letter, amap: AffineChartMap, lat):
    kind, idx, exp = letter
    n = lat.n
    size = 2 * n + 1
    if kind == "a":
        s = Q(lat.k) ** exp
        for i in range(size):
            for j in range(size):
                want = (s * s if i == 0 else s) if i == j else QZERO
                if amap.matrix[i][j] != want or amap.shift[i] != 0:
                    raise ValueError("a-action is not the stated scaling")
        return None
    # translations: x0 -> x0 - <u, x> - t_shift, x -> x + v
    for i in range(1, size):
        for j in range(1, size):
            if amap.matrix[i][j] != (1 if i == j else 0):
                raise ValueError("generator x-block is not a translation")
        if amap.matrix[i][0] != 0:
            raise ValueError("generator x-part must not involve x0")
    if amap.matrix[0][0] != 1:
        raise ValueError("generator must fix the x0 scale")
    u = tuple(-amap.matrix[0][j] for j in range(1, size))
    v = tuple(amap.shift[i] for i in range(1, size))
    t = -amap.shift[0]
    if kind == "c":
        if any(x != 0 for x in u) or any(x != 0 for x in v):
            raise ValueError("c must act by a pure x0 shift")
    return (u, v, t)


def chart_affine_data(lat: LatticePresentation) -> ChartAffineData:
    """Extract the (u_i, v_i, t) bases from the generator actions."""
    us, vs = [], []
    for i in range(1, 2 * lat.n + 1):
        _, data = psi_chart_action(GroupWord.parse(f"b{i}"), lat)
        u, v, _t = data
        us.append(u)
        vs.append(v)
    _, cdata = psi_chart_action(GroupWord.parse("c"), lat)
    _u, _v, t = cdata
    return ChartAffineData(u=tuple(us), v=tuple(vs), t=t)


def differential_shear_vectors(lat: LatticePresentation):
    """The u_gamma vectors of the generator differentials at the fixed point.

    These are the level +1 coefficients (the x_{2n+1} column) of the
    generator jets; ``c`` has the identity differential, so its vector is
    zero.
    """
    n = lat.n
    dim = 2 * n + 1
    e_last = tuple(1 if t == dim - 1 else 0 for t in range(dim))
    out = {}
    for i in range(1, 2 * n + 1):
        jet = phi_chart_jet(GroupWord.parse(f"b{i}"), lat, 1)
        out[f"b{i}"] = tuple(jet.components[j].coeff(e_last) for j in range(2 * n))
    out["c"] = (QZERO,) * (2 * n)
    return out
