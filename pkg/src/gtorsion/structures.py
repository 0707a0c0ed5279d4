"""G-structures on Lie algebra frames: model forms, validation, irreducible
projections, torsion classes, Lee forms and skew-torsion (Bismut) data.

Supported kinds: almost Hermitian (any even n), SU(3) on n=6, G2 on n=7,
Spin(7) on n=8.  All numerics are exact in the frame's scalar field.

Conventions fixed by the worked examples (see tests):

* J is defined by omega(X, Y) = g(X, JY);
* d^c omega(X,Y,Z) = -d omega(JX, JY, JZ);
* the Nijenhuis 3-form is N(X,Y,Z) = g(N(X,Y), Z) with
  N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y], and the torsion of the
  structure-preserving connection is H = d^c omega + N.
"""

from __future__ import annotations

from fractions import Fraction

from .forms import (
    FrameGeometry,
    GeometryError,
    KForm,
    VectorField,
    form_inner,
    hodge_star,
    indices_of,
    interior,
    wedge,
)
from .frames import (
    bismut_connection,
    covariant_derivative_form,
    curvature,
    levi_civita,
)
from .linsolve import LinearSolveError, solve_dense, solve_unique_sparse
from .forms import _masks
from .scalars import Field, NotRepresentable, Scalar

__all__ = [
    "StructureError",
    "GStructure",
    "TorsionClasses",
    "model_form",
    "induced_metric_g2",
    "su3_assemble",
    "g2_assemble",
    "spin7_assemble",
    "ah_assemble",
    "project",
    "torsion_su3",
    "torsion_g2",
    "torsion_spin7",
    "nijenhuis",
    "d_c_omega",
    "lee_form",
    "type_3003_projection",
    "bismut_torsion",
    "solve_skew_torsion",
    "bismut_ricci_form",
]


class StructureError(ValueError):
    pass


MODEL_OMEGA = [((1, 2), 1), ((3, 4), 1), ((5, 6), 1)]
MODEL_OMEGA_PLUS = [((1, 3, 5), 1), ((1, 4, 6), -1), ((2, 3, 6), -1), ((2, 4, 5), -1)]
MODEL_PHI = [
    ((1, 2, 7), 1), ((1, 3, 5), 1), ((1, 4, 6), -1), ((2, 3, 6), -1),
    ((2, 4, 5), -1), ((3, 4, 7), 1), ((5, 6, 7), 1),
]
MODEL_PSI = [
    ((1, 2, 3, 8), -1), ((1, 3, 4, 7), 1), ((1, 4, 5, 8), -1), ((1, 6, 7, 8), -1),
    ((1, 2, 5, 7), 1), ((1, 3, 5, 6), 1), ((1, 2, 4, 6), -1), ((4, 5, 6, 7), -1),
    ((2, 5, 6, 8), -1), ((2, 3, 6, 7), -1), ((2, 3, 4, 5), -1), ((3, 4, 6, 8), -1),
    ((2, 4, 7, 8), -1), ((3, 5, 7, 8), 1),
]


def model_form(kind: str, n: int, field: Field):
    """Model structure forms on the standard oriented orthonormal frame."""
    if kind == "su3":
        if n != 6:
            raise StructureError("su3 model needs n = 6")
        return (KForm.from_terms(6, field, MODEL_OMEGA), KForm.from_terms(6, field, MODEL_OMEGA_PLUS))
    if kind == "g2":
        if n != 7:
            raise StructureError("g2 model needs n = 7")
        return KForm.from_terms(7, field, MODEL_PHI)
    if kind == "spin7":
        if n != 8:
            raise StructureError("spin7 model needs n = 8")
        return KForm.from_terms(8, field, MODEL_PSI)
    if kind == "ah":
        if n % 2:
            raise StructureError("ah model needs even n")
        return KForm.from_terms(n, field, [((2 * i + 1, 2 * i + 2), 1) for i in range(n // 2)])
    raise StructureError(f"unknown structure kind {kind!r}")


class TorsionClasses:
    """Extracted torsion components; ``components`` maps name -> KForm/Scalar."""

    def __init__(self, kind: str, components: dict):
        self.kind = kind
        self.components = components

    def __getitem__(self, key):
        return self.components[key]

    def nonzero_names(self):
        out = []
        for name, val in self.components.items():
            if isinstance(val, Scalar):
                if not val.is_zero():
                    out.append(name)
            elif not val.is_zero():
                out.append(name)
        return out


class GStructure:
    """Tagged structure: kind, defining forms, frame, derived metric data.

    ``frame`` is anything with n / field / geometry / d(form) / bracket;
    the structure's own ``geometry`` (induced metric) is what every metric
    computation uses.
    """

    def __init__(self, kind, frame, geometry, forms: dict, j_matrix=None):
        self.kind = kind
        self.frame = frame
        self.geometry = geometry
        self.forms = forms
        self.j_matrix = j_matrix
        self.field = frame.field

    @property
    def n(self):
        return self.frame.n

    def form(self, name: str) -> KForm:
        return self.forms[name]

    def d(self, a: KForm) -> KForm:
        return self.frame.d(a)

    def apply_j(self, x: VectorField) -> VectorField:
        j = self.j_matrix
        n = self.n
        comps = []
        for a in range(n):
            val = self.field.zero()
            for c in range(n):
                if not j[a][c].is_zero():
                    val = val + j[a][c] * x.components[c]
            comps.append(val)
        return VectorField(n, self.field, comps)

    def apply_j_oneform(self, alpha: KForm) -> KForm:
        """(J alpha)(X) = -alpha(JX), i.e. (J alpha)_c = -sum_a alpha_a J^a_c."""
        j = self.j_matrix
        n = self.n
        out = {}
        for c in range(n):
            val = self.field.zero()
            for a in range(n):
                ca = alpha.coeffs.get(1 << a)
                if ca is not None and not j[a][c].is_zero():
                    val = val + ca * j[a][c]
            if not val.is_zero():
                out[1 << c] = -val
        return KForm(n, 1, self.field, out)


def _j_from_metric_omega(omega: KForm, geom: FrameGeometry):
    """J^a_c = sum_b g^{ab} omega_{bc}; requires J^2 = -Id."""
    n = geom.n
    field = geom.field
    ginv = geom.inverse_metric()
    j = []
    for a in range(n):
        row = []
        for c in range(n):
            val = field.zero()
            for b in range(n):
                w = omega.coeff(b + 1, c + 1)
                if not w.is_zero():
                    val = val + ginv[a][b] * w
            row.append(val)
        j.append(row)
    for i in range(n):
        for k in range(n):
            acc = field.zero()
            for b in range(n):
                acc = acc + j[i][b] * j[b][k]
            target = field.scalar(-1) if i == k else field.zero()
            if not (acc - target).is_zero():
                raise StructureError("J^2 != -Id: omega and metric are not compatible")
    return j


def su3_assemble(omega: KForm, omega_plus: KForm, frame) -> GStructure:
    """Assemble and validate an SU(3) structure from (omega, Omega+).

    The metric is induced by
    g(X,Y) omega^3 / 6 = -1/2 (i_X omega) ^ (i_Y Omega+) ^ Omega+,
    then Omega- := star Omega+, with the volume normalisation
    omega^3 = (3/2) Omega+ ^ Omega- enforced exactly.
    """
    if omega.k != 2 or omega_plus.k != 3 or frame.n != 6:
        raise StructureError("su3 needs a 2-form and 3-form on n = 6")
    field = frame.field
    if not wedge(omega, omega_plus).is_zero():
        raise StructureError("omega ^ Omega+ != 0")
    om3 = wedge(wedge(omega, omega), omega)
    full = (1 << 6) - 1
    om3c = om3.coeffs.get(full, field.zero())
    if om3c.is_zero():
        raise StructureError("omega^3 vanishes; omega is degenerate")
    denom = om3c / field.scalar(6)
    gmat = []
    for i in range(1, 7):
        row = []
        io = interior(VectorField.basis(6, field, i), omega)
        for jx in range(1, 7):
            jo = interior(VectorField.basis(6, field, jx), omega_plus)
            top = wedge(wedge(io, jo), omega_plus)
            val = top.coeffs.get(full, field.zero()) * field.scalar(Fraction(-1, 2)) / denom
            row.append(val)
        gmat.append(row)
    orient = 1 if om3c.sign() > 0 else -1
    geom = FrameGeometry(6, field, gmat, orientation_sign=orient)
    geom.check_positive_definite()
    omega_minus = hodge_star(omega_plus, geom)
    if om3 != wedge(omega_plus, omega_minus).scale(Fraction(3, 2)):
        raise StructureError("volume identity omega^3 = 3/2 Omega+ ^ Omega- fails")
    j = _j_from_metric_omega(omega, geom)
    _check_declared_metric(frame, geom)
    return GStructure(
        "su3", frame, geom,
        {"omega": omega, "omega_plus": omega_plus, "omega_minus": omega_minus},
        j_matrix=j,
    )


def induced_metric_g2(phi: KForm, frame=None, field: Field | None = None) -> FrameGeometry:
    """Metric of a positive 3-form on n=7 via
    (e_i . phi) ^ (e_j . phi) ^ phi = 6 B_ij e^{1..7}, g = (det B)^{-1/9} B."""
    if phi.k != 3 or phi.n != 7:
        raise StructureError("g2 metric needs a 3-form on n = 7")
    field = field or phi.field
    full = (1 << 7) - 1
    b = []
    ints = [interior(VectorField.basis(7, field, i), phi) for i in range(1, 8)]
    for i in range(7):
        row = []
        for j in range(7):
            top = wedge(wedge(ints[i], ints[j]), phi)
            row.append(top.coeffs.get(full, field.zero()) / field.scalar(6))
        b.append(row)
    from .forms import _mat_det

    # phi fixes the orientation as well: B is definite w.r.t. exactly one
    # sign of the volume form when phi is positive.
    det = _mat_det(b, field)
    if det.is_zero():
        raise StructureError("not a positive 3-form (det B = 0)")
    sign = 1 if b[0][0].sign() > 0 else -1
    bo = [[b[i][j] * sign for j in range(7)] for i in range(7)] if sign < 0 else b
    det_o = det * sign if 7 % 2 else det  # odd rank: det flips with the sign
    if det_o.sign() <= 0:
        raise StructureError("not a positive 3-form (det B <= 0)")
    # Hitchin scaling: need det(B)^{1/9} in the field
    try:
        scale = det_o.root(9)
    except NotRepresentable:
        raise StructureError(
            f"metric not representable exactly: det B = {det_o} has no 9th root in {field!r}"
        )
    inv = scale.inverse()
    g = [[bo[i][j] * inv for j in range(7)] for i in range(7)]
    geom = FrameGeometry(7, field, g, orientation_sign=sign)
    try:
        geom.check_positive_definite()
    except GeometryError as exc:
        raise StructureError("not a positive 3-form") from exc
    return geom


def g2_assemble(phi: KForm, frame) -> GStructure:
    if frame.n != 7:
        raise StructureError("g2 needs n = 7")
    geom = induced_metric_g2(phi, field=frame.field)
    _check_declared_metric(frame, geom)
    star_phi = hodge_star(phi, geom)
    return GStructure("g2", frame, geom, {"phi": phi, "star_phi": star_phi})


def spin7_assemble(psi: KForm, frame, geometry: FrameGeometry | None = None) -> GStructure:
    """Accepts Psi only in an adapted frame: Psi ^ Psi = 14 vol and
    star Psi = Psi under the frame metric; otherwise errors."""
    if frame.n != 8 or psi.k != 4:
        raise StructureError("spin7 needs a 4-form on n = 8")
    geom = geometry or frame.geometry
    geom.check_positive_definite()
    if wedge(psi, psi) != geom.volume_form().scale(14):
        raise StructureError("frame not adapted: Psi ^ Psi != 14 vol")
    if hodge_star(psi, geom) != psi:
        raise StructureError("frame not adapted: Psi is not self-dual")
    return GStructure("spin7", frame, geom, {"psi": psi})


def ah_assemble(omega: KForm, frame) -> GStructure:
    """Almost Hermitian structure from omega and the frame metric."""
    if frame.n % 2:
        raise StructureError("almost Hermitian needs even n")
    geom = frame.geometry
    geom.check_positive_definite()
    j = _j_from_metric_omega(omega, geom)
    return GStructure("ah", frame, geom, {"omega": omega}, j_matrix=j)


def _check_declared_metric(frame, geom: FrameGeometry):
    declared = getattr(frame.geometry, "metric", None)
    if declared is None:
        return
    if getattr(frame.geometry, "declared_explicitly", False):
        n = geom.n
        for i in range(n):
            for j in range(n):
                if not (declared[i][j] - geom.metric[i][j]).is_zero():
                    raise StructureError(
                        "declared frame metric disagrees with the structure-induced metric"
                    )


# -- irreducible projections ---------------------------------------------


def _gram_fit(target: KForm, family, geom: FrameGeometry):
    """Coefficients c with sum c_a family_a the orthogonal projection of
    target onto span(family); family must be linearly independent."""
    field = target.field
    m = [[form_inner(fa, fb, geom) for fb in family] for fa in family]
    rhs = [form_inner(target, fa, geom) for fa in family]
    return solve_dense(m, rhs, field)


def project(structure: GStructure, a: KForm) -> dict:
    """Split a 2- or 3-form into irreducible pieces for the structure kind.

    Returns a dict of named components summing exactly to ``a``; each
    component is re-verified against its defining linear condition.
    """
    kind = structure.kind
    geom = structure.geometry
    field = structure.field
    n = structure.n
    if kind == "g2":
        phi = structure.form("phi")
        star_phi = structure.form("star_phi")
        if a.k == 2:
            t = hodge_star(wedge(a, phi), geom)
            p7 = (t + a).scale(Fraction(1, 3))
            p14 = a - p7
            if not (wedge(p7, phi) - hodge_star(p7, geom).scale(2)).is_zero():
                raise StructureError("Lambda^2_7 component fails its defining condition")
            if not (wedge(p14, phi) + hodge_star(p14, geom)).is_zero():
                raise StructureError("Lambda^2_14 component fails its defining condition")
            return {"7": p7, "14": p14}
        if a.k == 3:
            p1 = phi.scale(form_inner(a, phi, geom) / field.scalar(7))
            family = [interior(VectorField.basis(7, field, i), star_phi) for i in range(1, 8)]
            coefs = _gram_fit(a - p1, family, geom)
            p7 = KForm.zero(7, 3, field)
            for c, fa in zip(coefs, family):
                p7 = p7 + fa.scale(c)
            p27 = a - p1 - p7
            if not wedge(p27, phi).is_zero() or not wedge(p27, star_phi).is_zero():
                raise StructureError("Lambda^3_27 component fails its defining condition")
            return {"1": p1, "7": p7, "27": p27}
        raise StructureError("g2 projections cover degrees 2 and 3 only")
    if kind == "spin7":
        psi = structure.form("psi")
        if a.k == 2:
            t = hodge_star(wedge(psi, a), geom)
            p7 = (a - t).scale(Fraction(1, 4))
            p21 = a - p7
            if not (hodge_star(wedge(psi, p7), geom) + p7.scale(3)).is_zero():
                raise StructureError("Lambda^2_7 component fails its defining condition")
            if not (hodge_star(wedge(psi, p21), geom) - p21).is_zero():
                raise StructureError("Lambda^2_21 component fails its defining condition")
            return {"7": p7, "21": p21}
        if a.k == 3:
            family = [interior(VectorField.basis(8, field, i), psi) for i in range(1, 9)]
            coefs = _gram_fit(a, family, geom)
            p8 = KForm.zero(8, 3, field)
            for c, fa in zip(coefs, family):
                p8 = p8 + fa.scale(c)
            p48 = a - p8
            if not wedge(p48, psi).is_zero():
                raise StructureError("Lambda^3_48 component fails its defining condition")
            return {"8": p8, "48": p48}
        raise StructureError("spin7 projections cover degrees 2 and 3 only")
    if kind == "su3":
        omega = structure.form("omega")
        op = structure.form("omega_plus")
        om = structure.form("omega_minus")
        if a.k == 2:
            p1 = omega.scale(form_inner(a, omega, geom) / field.scalar(3))
            family = [hodge_star(wedge(KForm(6, 1, field, {1 << i: field.one()}), op), geom) for i in range(6)]
            coefs = _gram_fit(a - p1, family, geom)
            p6 = KForm.zero(6, 2, field)
            for c, fa in zip(coefs, family):
                p6 = p6 + fa.scale(c)
            p8 = a - p1 - p6
            if not wedge(wedge(p8, omega), omega).is_zero() or not wedge(p8, op).is_zero():
                raise StructureError("Lambda^2_8 component fails its defining condition")
            return {"1": p1, "6": p6, "8": p8}
        if a.k == 3:
            cplus = form_inner(a, op, geom) / field.scalar(4)
            cminus = form_inner(a, om, geom) / field.scalar(4)
            p11 = op.scale(cplus) + om.scale(cminus)
            family = [wedge(KForm(6, 1, field, {1 << i: field.one()}), omega) for i in range(6)]
            coefs = _gram_fit(a - p11, family, geom)
            p6 = KForm.zero(6, 3, field)
            for c, fa in zip(coefs, family):
                p6 = p6 + fa.scale(c)
            p12 = a - p11 - p6
            if (
                not wedge(p12, omega).is_zero()
                or not wedge(p12, op).is_zero()
                or not wedge(p12, om).is_zero()
            ):
                raise StructureError("Lambda^3_12 component fails its defining condition")
            return {"1+1": p11, "6": p6, "12": p12}
        raise StructureError("su3 projections cover degrees 2 and 3 only")
    raise StructureError(f"no projections for kind {structure.kind!r}")


# -- torsion classes -------------------------------------------------------


def torsion_su3(s: GStructure) -> TorsionClasses:
    """Solve
    d omega  = -(3/2) sigma0 Omega+ + (3/2) pi0 Omega- + nu1 ^ omega + nu3
    d Omega+ = pi0 omega^2 + pi1 ^ Omega+ - pi2 ^ omega
    d Omega- = sigma0 omega^2 + (J pi1) ^ Omega+ - sigma2 ^ omega
    for the seven torsion forms, exactly, and verify the reconstruction.
    """
    field = s.field
    geom = s.geometry
    omega, op, om = s.form("omega"), s.form("omega_plus"), s.form("omega_minus")
    d_omega, d_op, d_om = s.d(omega), s.d(op), s.d(om)
    om2 = wedge(omega, omega)

    sigma0 = -(form_inner(d_omega, op, geom)) / field.scalar(6)
    pi0 = form_inner(d_omega, om, geom) / field.scalar(6)
    family6 = [wedge(KForm(6, 1, field, {1 << i: field.one()}), omega) for i in range(6)]
    nu1_coefs = _gram_fit(d_omega, family6, geom)
    nu1 = KForm(6, 1, field, {1 << i: c for i, c in enumerate(nu1_coefs) if not c.is_zero()})
    nu3 = d_omega - op.scale(field.scalar(Fraction(-3, 2)) * sigma0) - om.scale(field.scalar(Fraction(3, 2)) * pi0) - wedge(nu1, omega)

    pi0_b = form_inner(d_op, om2, geom) / field.scalar(12)
    if not (pi0 - pi0_b).is_zero():
        raise StructureError("inconsistent pi0 between d omega and d Omega+")
    family_op = [wedge(KForm(6, 1, field, {1 << i: field.one()}), op) for i in range(6)]
    pi1_coefs = _gram_fit(d_op - om2.scale(pi0), family_op, geom)
    pi1 = KForm(6, 1, field, {1 << i: c for i, c in enumerate(pi1_coefs) if not c.is_zero()})
    pi2 = -hodge_star(d_op - om2.scale(pi0) - wedge(pi1, op), geom)

    sigma0_b = form_inner(d_om, om2, geom) / field.scalar(12)
    if not (sigma0 - sigma0_b).is_zero():
        raise StructureError("inconsistent sigma0 between d omega and d Omega-")
    jpi1 = s.apply_j_oneform(pi1)
    sigma2 = -hodge_star(d_om - om2.scale(sigma0) - wedge(jpi1, op), geom)

    out = TorsionClasses(
        "su3",
        {
            "sigma0": sigma0,
            "pi0": pi0,
            "nu1": nu1,
            "pi1": pi1,
            "sigma2": sigma2,
            "pi2": pi2,
            "nu3": nu3,
        },
    )
    _validate_su3_reconstruction(s, out)
    return out


def _validate_su3_reconstruction(s: GStructure, t: TorsionClasses):
    field = s.field
    omega, op, om = s.form("omega"), s.form("omega_plus"), s.form("omega_minus")
    om2 = wedge(omega, omega)
    sigma0, pi0 = t["sigma0"], t["pi0"]
    nu1, pi1, sigma2, pi2, nu3 = t["nu1"], t["pi1"], t["sigma2"], t["pi2"], t["nu3"]
    r1 = op.scale(field.scalar(Fraction(-3, 2)) * sigma0) + om.scale(field.scalar(Fraction(3, 2)) * pi0) + wedge(nu1, omega) + nu3
    if r1 != s.d(omega):
        raise StructureError("d omega reconstruction failed")
    r2 = om2.scale(pi0) + wedge(pi1, op) - wedge(pi2, omega)
    if r2 != s.d(op):
        raise StructureError("d Omega+ reconstruction failed")
    jpi1 = s.apply_j_oneform(pi1)
    r3 = om2.scale(sigma0) + wedge(jpi1, op) - wedge(sigma2, omega)
    if r3 != s.d(om):
        raise StructureError("d Omega- reconstruction failed")
    geom = s.geometry
    if not wedge(nu3, omega).is_zero() or not wedge(nu3, op).is_zero() or not wedge(nu3, om).is_zero():
        raise StructureError("nu3 is not primitive of type Lambda^3_12")
    for beta in (sigma2, pi2):
        if not wedge(wedge(beta, omega), omega).is_zero() or not wedge(beta, op).is_zero():
            raise StructureError("sigma2/pi2 is not in Lambda^2_8")


def torsion_g2(s: GStructure) -> TorsionClasses:
    """Fernandez-Gray components:
    d phi      = tau0 (star phi) + 3 tau1 ^ phi + star tau3
    d star phi = 4 tau1 ^ (star phi) + tau2 ^ phi
    with the Lee form theta = 4 tau1.
    """
    field = s.field
    geom = s.geometry
    phi, star_phi = s.form("phi"), s.form("star_phi")
    d_phi, d_star = s.d(phi), s.d(star_phi)
    tau0 = form_inner(d_phi, star_phi, geom) / field.scalar(7)
    family = [wedge(KForm(7, 1, field, {1 << i: field.one()}), phi) for i in range(7)]
    coefs = _gram_fit(d_phi - star_phi.scale(tau0), family, geom)
    tau1 = KForm(7, 1, field, {1 << i: c / field.scalar(3) for i, c in enumerate(coefs) if not c.is_zero()})
    star_tau3 = d_phi - star_phi.scale(tau0) - wedge(tau1, phi).scale(3)
    tau3 = hodge_star(star_tau3, geom)
    tau2 = -hodge_star(d_star - wedge(tau1, star_phi).scale(4), geom)
    out = TorsionClasses(
        "g2",
        {"tau0": tau0, "tau1": tau1, "tau2": tau2, "tau3": tau3, "lee": tau1.scale(4)},
    )
    # reconstruction and representation checks
    if s.d(phi) != star_phi.scale(tau0) + wedge(tau1, phi).scale(3) + star_tau3:
        raise StructureError("d phi reconstruction failed")
    if s.d(star_phi) != wedge(tau1, star_phi).scale(4) + wedge(tau2, phi):
        raise StructureError("d star-phi reconstruction failed")
    if not wedge(tau3, phi).is_zero() or not wedge(tau3, star_phi).is_zero():
        raise StructureError("tau3 is not in Lambda^3_27")
    if not (wedge(tau2, phi) + hodge_star(tau2, geom)).is_zero():
        raise StructureError("tau2 is not in Lambda^2_14")
    return out


def torsion_spin7(s: GStructure) -> TorsionClasses:
    """theta = -(1/7) star(star dPsi ^ Psi); zeta5 = dPsi - theta ^ Psi."""
    field = s.field
    geom = s.geometry
    psi = s.form("psi")
    d_psi = s.d(psi)
    theta = hodge_star(wedge(hodge_star(d_psi, geom), psi), geom).scale(Fraction(-1, 7))
    zeta5 = d_psi - wedge(theta, psi)
    relee = hodge_star(wedge(hodge_star(zeta5, geom), psi), geom).scale(Fraction(-1, 7))
    if not relee.is_zero():
        raise StructureError("zeta5 still carries a Lee component")
    return TorsionClasses("spin7", {"lee": theta, "zeta5": zeta5})


def lee_form(s: GStructure, torsion: TorsionClasses | None = None, h: KForm | None = None) -> KForm:
    """The structure's Lee form.

    AH/SU(3): theta(X) = -1/2 sum_i H(JX, e_i, J e_i) computed from the
    skew torsion; G2: 4 tau1; Spin(7): the defining star formula.
    """
    if s.kind == "g2":
        torsion = torsion or torsion_g2(s)
        return torsion["lee"]
    if s.kind == "spin7":
        torsion = torsion or torsion_spin7(s)
        return torsion["lee"]
    field = s.field
    n = s.n
    h = h if h is not None else bismut_torsion(s)
    basis = [VectorField.basis(n, field, i) for i in range(1, n + 1)]
    jbasis = [s.apply_j(b) for b in basis]
    comps = {}
    for a in range(n):
        jx = jbasis[a]
        val = field.zero()
        ih = interior(jx, h)
        for i in range(n):
            val = val + form_eval2(ih, basis[i], jbasis[i], field)
        val = val * field.scalar(Fraction(-1, 2))
        if not val.is_zero():
            comps[1 << a] = val
    return KForm(n, 1, field, comps)


def form_eval2(f: KForm, x: VectorField, y: VectorField, field: Field) -> Scalar:
    acc = field.zero()
    for m, c in f.coeffs.items():
        i, j = indices_of(m)
        acc = acc + c * (x.components[i - 1] * y.components[j - 1] - x.components[j - 1] * y.components[i - 1])
    return acc


def nijenhuis(s: GStructure) -> KForm:
    """Nijenhuis 3-form N(X,Y,Z) = g(N(X,Y), Z); errors when not skew."""
    if s.kind not in ("ah", "su3"):
        raise StructureError("Nijenhuis tensor needs an almost complex structure")
    field = s.field
    n = s.n
    geom = s.geometry
    basis = [VectorField.basis(n, field, i) for i in range(1, n + 1)]
    jb = [s.apply_j(b) for b in basis]
    frame = s.frame

    def nvec(i, j):
        t = frame.bracket(jb[i], jb[j])
        t = t - s.apply_j(frame.bracket(jb[i], basis[j]))
        t = t - s.apply_j(frame.bracket(basis[i], jb[j]))
        t = t - frame.bracket(basis[i], basis[j])
        return t

    vals = {}
    for i in range(n):
        for j in range(i, n):
            nv = nvec(i, j)
            for k in range(n):
                vals[(i, j, k)] = geom.g(nv, basis[k])
                vals[(j, i, k)] = -vals[(i, j, k)]
    coeffs = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = vals[(i, j, k)]
                if not (vals[(i, k, j)] + v).is_zero() or not (vals[(k, j, i)] + v).is_zero():
                    raise StructureError(
                        "Nijenhuis tensor not skew: no skew-torsion connection exists"
                    )
                if not v.is_zero():
                    coeffs[(1 << i) | (1 << j) | (1 << k)] = v
    for i in range(n):
        for k in range(n):
            if not vals[(i, i, k)].is_zero():
                raise StructureError("Nijenhuis tensor not skew: no skew-torsion connection exists")
            if not vals[(i, k, k)].is_zero():
                raise StructureError("Nijenhuis tensor not skew: no skew-torsion connection exists")
    return KForm(n, 3, field, coeffs)


def d_c_omega(s: GStructure) -> KForm:
    """d^c omega(X,Y,Z) = -d omega(JX, JY, JZ)."""
    field = s.field
    n = s.n
    omega = s.form("omega")
    dom = s.d(omega)
    basis = [VectorField.basis(n, field, i) for i in range(1, n + 1)]
    jb = [s.apply_j(b) for b in basis]
    coeffs = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = -_form_eval3(dom, jb[i], jb[j], jb[k], field)
                if not v.is_zero():
                    coeffs[(1 << i) | (1 << j) | (1 << k)] = v
    return KForm(n, 3, field, coeffs)


def _form_eval3(f: KForm, x, y, z, field: Field) -> Scalar:
    acc = field.zero()
    for m, c in f.coeffs.items():
        i, j, k = indices_of(m)
        xi, xj, xk = x.components[i - 1], x.components[j - 1], x.components[k - 1]
        yi, yj, yk = y.components[i - 1], y.components[j - 1], y.components[k - 1]
        zi, zj, zk = z.components[i - 1], z.components[j - 1], z.components[k - 1]
        det = (
            xi * (yj * zk - yk * zj)
            - xj * (yi * zk - yk * zi)
            + xk * (yi * zj - yj * zi)
        )
        acc = acc + c * det
    return acc


def type_3003_projection(s: GStructure, gamma: KForm) -> KForm:
    """Real (3,0)+(0,3) part of a 3-form:
    1/4 [g(X,Y,Z) - g(JX,JY,Z) - g(JX,Y,JZ) - g(X,JY,JZ)]."""
    field = s.field
    n = s.n
    basis = [VectorField.basis(n, field, i) for i in range(1, n + 1)]
    jb = [s.apply_j(b) for b in basis]
    coeffs = {}
    quarter = field.scalar(Fraction(1, 4))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = (
                    _form_eval3(gamma, basis[i], basis[j], basis[k], field)
                    - _form_eval3(gamma, jb[i], jb[j], basis[k], field)
                    - _form_eval3(gamma, jb[i], basis[j], jb[k], field)
                    - _form_eval3(gamma, basis[i], jb[j], jb[k], field)
                ) * quarter
                if not v.is_zero():
                    coeffs[(1 << i) | (1 << j) | (1 << k)] = v
    return KForm(n, 3, field, coeffs)


def bismut_torsion(s: GStructure, torsion: TorsionClasses | None = None) -> KForm:
    """Closed-form torsion of the structure-preserving skew connection.

    AH/SU3: H = d^c omega + N (N must be skew);
    G2:     H = -star d phi + star(theta ^ phi) + (1/6)<d phi, star phi> phi,
            defined only when tau2 = 0;
    Spin7:  H = -star d Psi + (7/6) star(theta ^ Psi).
    """
    field = s.field
    geom = s.geometry
    if s.kind in ("ah", "su3"):
        return d_c_omega(s) + nijenhuis(s)
    if s.kind == "g2":
        torsion = torsion or torsion_g2(s)
        if not torsion["tau2"].is_zero():
            raise StructureError("tau2 != 0: no skew-torsion connection for this G2 structure")
        phi, star_phi = s.form("phi"), s.form("star_phi")
        d_phi = s.d(phi)
        theta = torsion["lee"]
        return (
            -hodge_star(d_phi, geom)
            + hodge_star(wedge(theta, phi), geom)
            + phi.scale(form_inner(d_phi, star_phi, geom) / field.scalar(6))
        )
    if s.kind == "spin7":
        torsion = torsion or torsion_spin7(s)
        psi = s.form("psi")
        return -hodge_star(s.d(psi), geom) + hodge_star(
            wedge(torsion["lee"], psi), geom
        ).scale(Fraction(7, 6))
    raise StructureError(f"no torsion formula for kind {s.kind!r}")


def _structure_target_forms(s: GStructure):
    if s.kind == "su3":
        return [s.form("omega"), s.form("omega_plus")]
    if s.kind == "ah":
        return [s.form("omega")]
    if s.kind == "g2":
        return [s.form("phi")]
    if s.kind == "spin7":
        return [s.form("psi")]
    raise StructureError(f"unknown kind {s.kind!r}")


def solve_skew_torsion(s: GStructure) -> KForm:
    """Independent route to the torsion: solve the exact linear system for
    H in Lambda^3 with D + (1/2) g^{-1} H annihilating every structure form.
    """
    field = s.field
    n = s.n
    geom = s.geometry
    frame = s.frame
    masks3 = list(_masks(n, 3))
    colof = {m: c for c, m in enumerate(masks3)}
    lc = levi_civita(frame, geom)
    ginv = geom.inverse_metric()

    from itertools import permutations

    from .frames import _reinsert_sign

    targets = _structure_target_forms(s)
    half = field.scalar(Fraction(1, 2))
    rows = []
    for alpha in targets:
        base = covariant_derivative_form(frame, lc, alpha)
        # sparse H-contributions: entries[(i, target_mask)][column] accumulate;
        # for H = e^K only index permutations of K enter the connection term.
        entries: dict[tuple[int, int], dict[int, Scalar]] = {}
        # index forms by which frame index they contain
        by_index: dict[int, list[tuple[int, int, int, Scalar]]] = {j: [] for j in range(1, n + 1)}
        for m_mask, coef in alpha.coeffs.items():
            idx = indices_of(m_mask)
            for p, jp in enumerate(idx):
                by_index[jp].append((m_mask, m_mask ^ (1 << (jp - 1)), p, coef))
        for K in masks3:
            a, b, c = indices_of(K)
            col = colof[K]
            for (ia, tb, kc) in permutations((a, b, c)):
                sgn_h = _perm_sign_3((a, b, c), (ia, tb, kc))
                for jp in range(1, n + 1):
                    gv = ginv[jp - 1][kc - 1]
                    if gv.is_zero():
                        continue
                    gam = gv * half * sgn_h  # gamma^{jp}_{ia-1, tb} contribution
                    for m_mask, rest, p, coef in by_index[jp]:
                        if tb == jp:
                            tgt, sgn = m_mask, 1
                        elif rest & (1 << (tb - 1)):
                            continue
                        else:
                            tgt = rest | (1 << (tb - 1))
                            sgn = _reinsert_sign(rest, tb - 1, p)
                        add = -coef * gam
                        key = (ia - 1, tgt)
                        slot = entries.setdefault(key, {})
                        slot[col] = slot.get(col, field.zero()) + (add if sgn > 0 else -add)
        keys = set(entries)
        for i in range(n):
            for m_mask in base[i].coeffs:
                keys.add((i, m_mask))
        for (i, m_mask) in sorted(keys):
            row = {cc: v for cc, v in entries.get((i, m_mask), {}).items() if not v.is_zero()}
            rhs = -(base[i].coeffs.get(m_mask, field.zero()))
            if row or not rhs.is_zero():
                rows.append((row, rhs))
    try:
        sol = solve_unique_sparse(rows, len(masks3), field)
    except LinearSolveError as exc:
        if "no solution" in str(exc):
            raise StructureError("no skew-torsion connection: the linear system is inconsistent") from exc
        raise StructureError("non-unique skew torsion: dimension count violated") from exc
    return KForm(n, 3, field, {m: sol[colof[m]] for m in masks3 if not sol[colof[m]].is_zero()})


def _perm_sign_3(src, dst) -> int:
    perm = (src.index(dst[0]), src.index(dst[1]), src.index(dst[2]))
    sign = 1
    for i in range(3):
        for j in range(i + 1, 3):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def bismut_ricci_form(s: GStructure, h: KForm | None = None) -> KForm:
    """rho(X,Y) = (1/2) sum_i R(X, Y, e_i, J e_i) for the Bismut connection;
    rho = 0 certifies reduced holonomy."""
    if s.kind not in ("ah", "su3"):
        raise StructureError("Bismut Ricci form needs an almost Hermitian structure")
    field = s.field
    n = s.n
    geom = s.geometry
    h = h if h is not None else bismut_torsion(s)
    conn = bismut_connection(s.frame, h, geom)
    cur = curvature(s.frame, conn, geom)
    basis = [VectorField.basis(n, field, i) for i in range(1, n + 1)]
    jb = [s.apply_j(b) for b in basis]
    half = field.scalar(Fraction(1, 2))
    coeffs = {}
    for x in range(n):
        for y in range(x + 1, n):
            val = field.zero()
            for i in range(n):
                # R(e_x, e_y, e_i, J e_i) = g(R(e_x,e_y) e_i, J e_i)
                rv = cur.riemann[x][y][i]
                val = val + geom.g(rv, jb[i])
            val = val * half
            if not val.is_zero():
                coeffs[(1 << x) | (1 << y)] = val
    return KForm(n, 2, field, coeffs)
