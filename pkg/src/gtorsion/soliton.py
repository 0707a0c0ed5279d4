"""Generalized Ricci soliton residuals, weighted scalar curvature, the
canonical vector field, and scalar rigidity identities.

The defining equations:

* GRS:         Rc^nabla + nabla X^flat = 0  (nabla the Bismut connection of (g, H));
* string GRS:  Rc^nabla + F^2 + nabla X^flat = 0,
               d*F - <F,H> + i_X F = 0,
               dH + F ^ F = 0,

where F^2 acts as the endomorphism square F_i^k F_kj (the negative of the
positive-definite pairing <i_X F, i_Y F>); this sign is pinned by the
reduced worked examples.
"""

from __future__ import annotations

from fractions import Fraction

from .forms import (
    KForm,
    VectorField,
    contract_2_3,
    form_inner,
    interior,
    musical,
    musical_inv,
    two_form_square,
    wedge,
)
from .frames import (
    bismut_connection,
    codifferential,
    covariant_derivative_oneform,
    curvature,
    levi_civita,
)
from .structures import GStructure, StructureError, TorsionClasses, bismut_torsion, torsion_g2, torsion_spin7

__all__ = [
    "SolitonData",
    "grs_residual",
    "string_grs_residual",
    "weighted_scalar",
    "canonical_vector",
    "parallel_certificate",
    "g2_rigidity_identity",
    "spin7_dilatino_residual",
    "PreconditionError",
]


class PreconditionError(ValueError):
    pass


class SolitonData:
    """Frame + torsion 3-form + soliton vector; optional invariant closed df
    and string flux F."""

    def __init__(self, frame, h: KForm, x: VectorField, df: KForm | None = None, f: KForm | None = None, geometry=None):
        self.frame = frame
        self.geometry = geometry or frame.geometry
        if h.k != 3:
            raise ValueError("H must be a 3-form")
        self.h = h
        self.x = x
        field = frame.field
        self.df = df if df is not None else KForm.zero(frame.n, 1, field)
        if not frame.d(self.df).is_zero():
            raise ValueError("df must be closed")
        self.flux = f

    def bianchi(self) -> KForm:
        """dH (or dH + F ^ F when a flux is present)."""
        out = self.frame.d(self.h)
        if self.flux is not None:
            out = out + wedge(self.flux, self.flux)
        return out


def grs_residual(data: SolitonData):
    """Rc^{nabla(g,H)} + nabla X^flat as an n x n Scalar matrix."""
    frame, geom = data.frame, data.geometry
    conn = bismut_connection(frame, data.h, geom)
    cur = curvature(frame, conn, geom)
    xflat = musical(data.x, geom)
    nx = covariant_derivative_oneform(frame, conn, xflat)
    n = frame.n
    return [[cur.ricci[i][j] + nx[i][j] for j in range(n)] for i in range(n)]


def string_grs_residual(data: SolitonData):
    """The triple (Rc^nabla + F^2 + nabla X^flat, d*F - <F,H> + i_X F, dH + F^F)."""
    if data.flux is None:
        raise ValueError("string residual needs a flux 2-form F")
    frame, geom = data.frame, data.geometry
    n = frame.n
    f = data.flux
    mat = grs_residual(data)
    fsq = two_form_square(f, geom)
    slot1 = [[mat[i][j] - fsq[i][j] for j in range(n)] for i in range(n)]
    slot2 = codifferential(frame, f, geom) - contract_2_3(f, data.h, geom) + interior(data.x, f)
    slot3 = frame.d(data.h) + wedge(f, f)
    return slot1, slot2, slot3


def divergence(frame, x: VectorField, geometry=None):
    """Trace of the Levi-Civita covariant derivative of X."""
    geom = geometry or frame.geometry
    lc = levi_civita(frame, geom)
    field = frame.field
    acc = field.zero()
    for i in range(frame.n):
        v = lc.nabla(frame.basis_vector(i + 1), x)
        acc = acc + v.components[i]
    return acc


def scalar_curvature(frame, geometry=None):
    """Riemannian scalar curvature of the Levi-Civita connection."""
    geom = geometry or frame.geometry
    lc = levi_civita(frame, geom)
    cur = curvature(frame, lc, geom)
    ginv = geom.inverse_metric()
    field = frame.field
    acc = field.zero()
    n = frame.n
    for i in range(n):
        for j in range(n):
            if not ginv[i][j].is_zero():
                acc = acc + ginv[i][j] * cur.ricci[i][j]
    return acc


def weighted_scalar(data: SolitonData):
    """R - (1/12)|H|^2 + 2 div X - |X|^2 (equals lambda + |V|^2 on solitons)."""
    frame, geom = data.frame, data.geometry
    field = frame.field
    r = scalar_curvature(frame, geom)
    h2 = form_inner(data.h, data.h, geom)
    divx = divergence(frame, data.x, geom)
    x2 = geom.norm_sq(data.x)
    return r - h2 * field.scalar(Fraction(1, 12)) + divx * field.scalar(2) - x2


def canonical_vector(s: GStructure, df: KForm | None = None, torsion: TorsionClasses | None = None) -> VectorField:
    """V = theta^sharp - grad f per kind ((7/6) theta^sharp for Spin(7))."""
    from .structures import lee_form

    geom = s.geometry
    field = s.field
    if s.kind == "g2":
        torsion = torsion or torsion_g2(s)
        theta = torsion["lee"]
    elif s.kind == "spin7":
        torsion = torsion or torsion_spin7(s)
        theta = torsion["lee"].scale(Fraction(7, 6))
    elif s.kind in ("su3", "ah"):
        theta = lee_form(s, torsion)
    else:
        raise StructureError(f"no canonical vector for kind {s.kind!r}")
    v = musical_inv(theta, geom)
    if df is not None:
        v = v - musical_inv(df, geom)
    return v


def parallel_certificate(frame, h: KForm, v: VectorField, geometry=None) -> dict:
    """Check nabla^{Bismut} V = 0; |V| is then automatically constant."""
    geom = geometry or frame.geometry
    conn = bismut_connection(frame, h, geom)
    derivs = [conn.nabla(frame.basis_vector(i + 1), v) for i in range(frame.n)]
    parallel = all(d.is_zero() for d in derivs)
    return {"parallel": parallel, "norm_sq": geom.norm_sq(v)}


def g2_rigidity_identity(s: GStructure, df: KForm | None = None, torsion: TorsionClasses | None = None):
    """With V = 0 and constant f the pointwise identity
    |H_phi|^2 = (49/36) tau0^2 holds; returns both sides."""
    if s.kind != "g2":
        raise StructureError("rigidity identity is for G2 structures")
    torsion = torsion or torsion_g2(s)
    if df is not None and not df.is_zero():
        raise PreconditionError("rigidity identity needs constant f (df = 0)")
    v = canonical_vector(s, df, torsion)
    if not v.is_zero():
        raise PreconditionError("rigidity identity needs V = 0 (Lee form dual minus grad f)")
    h = bismut_torsion(s, torsion)
    field = s.field
    lhs = form_inner(h, h, s.geometry)
    rhs = field.scalar(Fraction(49, 36)) * torsion["tau0"] * torsion["tau0"]
    return lhs, rhs


def spin7_dilatino_residual(s: GStructure, torsion: TorsionClasses | None = None):
    """(7/6) d*theta + (7/6)|theta|^2 - |zeta5|^2, zero on strong torsion."""
    if s.kind != "spin7":
        raise StructureError("dilatino residual is for Spin(7) structures")
    torsion = torsion or torsion_spin7(s)
    field = s.field
    geom = s.geometry
    theta = torsion["lee"]
    zeta = torsion["zeta5"]
    dstar = codifferential(s.frame, theta, geom).coeffs.get(0, field.zero())
    coef = field.scalar(Fraction(7, 6))
    return coef * dstar + coef * form_inner(theta, theta, geom) - form_inner(zeta, zeta, geom)
