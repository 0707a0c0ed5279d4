"""Graded exterior algebra over an oriented inner-product frame, n <= 8.

Basis k-vectors are index subsets of {1..n} encoded as n-bit masks
(bit i-1 set means index i is present).  Coefficients are Scalars from a
single field; missing masks mean zero.  All values are immutable and all
operations are pure.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .scalars import Field, NotRepresentable, Scalar

__all__ = [
    "KForm",
    "FrameGeometry",
    "VectorField",
    "mask_of",
    "indices_of",
    "wedge",
    "interior",
    "hodge_star",
    "form_inner",
    "musical",
    "musical_inv",
    "two_form_square",
    "contract_2_3",
    "GeometryError",
]


class GeometryError(ValueError):
    pass


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        bit = 1 << (i - 1)
        if m & bit:
            return -1  # repeated index
        m |= bit
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _merge_sign(a: int, b: int) -> int:
    """Parity sign of sorting the concatenation of disjoint masks a, b."""
    sign = 1
    bb = b
    while bb:
        low = bb & -bb
        # count set bits of a strictly above this bit of b
        above = a & ~(low | (low - 1))
        if bin(above).count("1") & 1:
            sign = -sign
        bb ^= low
    return sign


class KForm:
    """Invariant k-form: dimension n, degree k, {mask: Scalar} coefficients."""

    __slots__ = ("n", "k", "field", "coeffs")

    def __init__(self, n: int, k: int, field: Field, coeffs: dict[int, Scalar] | None = None):
        if not 1 <= n <= 8:
            raise ValueError(f"dimension {n} outside 1..8")
        if not 0 <= k <= n:
            raise ValueError(f"degree {k} outside 0..{n}")
        self.n = n
        self.k = k
        self.field = field
        clean: dict[int, Scalar] = {}
        if coeffs:
            for m, c in coeffs.items():
                if bin(m).count("1") != k:
                    raise ValueError(f"mask {m:b} has wrong cardinality for degree {k}")
                if not c.is_zero():
                    clean[m] = c
        self.coeffs = clean

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, n: int, k: int, field: Field) -> "KForm":
        return cls(n, k, field, {})

    @classmethod
    def from_terms(cls, n: int, field: Field, terms: Iterable[tuple[Iterable[int], object]]) -> "KForm":
        """Build from (indices, coefficient) pairs; all same degree."""
        acc: dict[int, Scalar] = {}
        deg = None
        for idx, c in terms:
            idx = tuple(idx)
            if deg is None:
                deg = len(idx)
            elif len(idx) != deg:
                raise ValueError("mixed degrees in term list")
            m = mask_of(idx)
            if m < 0:
                continue  # repeated index wedges to zero
            sign = _sort_sign(idx)
            val = field.scalar(c) * sign
            acc[m] = acc.get(m, field.zero()) + val
        if deg is None:
            raise ValueError("empty term list needs an explicit degree")
        return cls(n, deg, field, acc)

    @classmethod
    def scalar_form(cls, n: int, field: Field, value) -> "KForm":
        return cls(n, 0, field, {0: field.scalar(value)})

    # -- ring structure --------------------------------------------------

    def __add__(self, other: "KForm") -> "KForm":
        self._check_compatible(other)
        acc = dict(self.coeffs)
        for m, c in other.coeffs.items():
            acc[m] = acc.get(m, self.field.zero()) + c
        return KForm(self.n, self.k, self.field, acc)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.n, self.k, self.field, {m: -c for m, c in self.coeffs.items()})

    def scale(self, c) -> "KForm":
        s = self.field.scalar(c) if not isinstance(c, Scalar) else c
        return KForm(self.n, self.k, self.field, {m: v * s for m, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        if self.n != other.n or self.k != other.k:
            return False
        for m in self.coeffs.keys() | other.coeffs.keys():
            a = self.coeffs.get(m, self.field.zero())
            b = other.coeffs.get(m, other.field.zero())
            if not (a - b).is_zero():
                return False
        return True

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def coeff(self, *indices: int) -> Scalar:
        idx = tuple(indices)
        m = mask_of(idx)
        if m < 0:
            return self.field.zero()
        c = self.coeffs.get(m, self.field.zero())
        return c * _sort_sign(idx)

    def _check_compatible(self, other: "KForm"):
        if self.n != other.n:
            raise GeometryError(f"dimension mismatch: {self.n} vs {other.n}")
        if self.k != other.k:
            raise GeometryError(f"degree mismatch: {self.k} vs {other.k}")

    def __repr__(self):
        if not self.coeffs:
            return f"KForm({self.n},{self.k}; 0)"
        parts = []
        for m in sorted(self.coeffs):
            idx = "".join(str(i) for i in indices_of(m))
            parts.append(f"({self.coeffs[m]})e{idx}")
        return f"KForm({self.n},{self.k}; " + " + ".join(parts) + ")"


def _sort_sign(idx: tuple[int, ...]) -> int:
    """Parity of the permutation sorting idx (assumed distinct)."""
    sign = 1
    lst = list(idx)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return sign


class VectorField:
    """Invariant vector field: n components in the frame basis."""

    __slots__ = ("n", "field", "components")

    def __init__(self, n: int, field: Field, components):
        comps = [c if isinstance(c, Scalar) else field.scalar(c) for c in components]
        if len(comps) != n:
            raise ValueError("component count != n")
        self.n = n
        self.field = field
        self.components = tuple(comps)

    @classmethod
    def zero(cls, n: int, field: Field) -> "VectorField":
        return cls(n, field, [0] * n)

    @classmethod
    def basis(cls, n: int, field: Field, i: int) -> "VectorField":
        return cls(n, field, [1 if j == i else 0 for j in range(1, n + 1)])

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.n, self.field, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.n, self.field, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.n, self.field, [-a for a in self.components])

    def scale(self, c) -> "VectorField":
        s = c if isinstance(c, Scalar) else self.field.scalar(c)
        return VectorField(self.n, self.field, [a * s for a in self.components])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.n == other.n and all((a - b).is_zero() for a, b in zip(self.components, other.components))

    def __repr__(self):
        return f"VectorField({[str(c) for c in self.components]})"


class FrameGeometry:
    """Metric + orientation data for an n-dimensional frame.

    ``metric`` is a symmetric n x n Scalar matrix (default identity);
    ``orientation_sign`` is the parity of the declared positive frame order
    relative to label order.
    """

    def __init__(self, n: int, field: Field, metric=None, orientation_sign: int = 1):
        self.n = n
        self.field = field
        if metric is None:
            metric = [
                [field.one() if i == j else field.zero() for j in range(n)]
                for i in range(n)
            ]
        else:
            metric = [[field.scalar(x) if not isinstance(x, Scalar) else x for x in row] for row in metric]
            for i in range(n):
                for j in range(n):
                    if not (metric[i][j] - metric[j][i]).is_zero():
                        raise GeometryError("metric is not symmetric")
        self.metric = metric
        if orientation_sign not in (1, -1):
            raise ValueError("orientation_sign must be +-1")
        self.orientation_sign = orientation_sign
        self._inverse = None
        self._sqrt_det = None
        self._gram_cache: dict[tuple[int, int], Scalar] = {}
        self._is_identity = all(
            (metric[i][j] - (field.one() if i == j else field.zero())).is_zero()
            for i in range(n)
            for j in range(n)
        )

    # -- metric utilities ----------------------------------------------

    def check_positive_definite(self):
        """Leading principal minors must all be positive."""
        m = [row[:] for row in self.metric]
        n = self.n
        # fraction-free-ish elimination tracking minor signs
        for k in range(n):
            piv = m[k][k]
            if piv.sign() <= 0:
                raise GeometryError("metric is not positive-definite")
            for i in range(k + 1, n):
                f = m[i][k] / piv
                for j in range(k, n):
                    m[i][j] = m[i][j] - f * m[k][j]

    def inverse_metric(self):
        if self._inverse is None:
            self._inverse = _mat_inverse(self.metric, self.field)
        return self._inverse

    def det_metric(self) -> Scalar:
        return _mat_det(self.metric, self.field)

    def sqrt_det(self) -> Scalar:
        if self._sqrt_det is None:
            det = self.det_metric()
            if det.sign() <= 0:
                raise GeometryError("metric determinant not positive")
            try:
                self._sqrt_det = det.sqrt()
            except NotRepresentable as exc:
                raise GeometryError(
                    f"volume normalisation sqrt(det g) = sqrt({det}) not in {self.field!r}"
                ) from exc
        return self._sqrt_det

    def volume_form(self) -> KForm:
        full = (1 << self.n) - 1
        c = self.sqrt_det() * self.orientation_sign
        return KForm(self.n, self.n, self.field, {full: c})

    def g(self, x: VectorField, y: VectorField) -> Scalar:
        acc = self.field.zero()
        for i in range(self.n):
            if x.components[i].is_zero():
                continue
            for j in range(self.n):
                acc = acc + x.components[i] * self.metric[i][j] * y.components[j]
        return acc

    def norm_sq(self, x: VectorField) -> Scalar:
        return self.g(x, x)

    def subset_gram(self, a_mask: int, b_mask: int) -> Scalar:
        """<e^A, e^B> = det of the |A| x |B| minor of the inverse metric."""
        key = (a_mask, b_mask) if a_mask <= b_mask else (b_mask, a_mask)
        cached = self._gram_cache.get(key)
        if cached is not None:
            return cached
        ai = indices_of(a_mask)
        bi = indices_of(b_mask)
        if len(ai) != len(bi):
            raise GeometryError("gram of different-size subsets")
        if not ai:
            return self.field.one()
        ginv = self.inverse_metric()
        sub = [[ginv[i - 1][j - 1] for j in bi] for i in ai]
        val = _mat_det(sub, self.field)
        self._gram_cache[key] = val
        return val


def _mat_det(m, field: Field) -> Scalar:
    n = len(m)
    a = [row[:] for row in m]
    det = field.one()
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return field.zero()
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = a[col][col].inverse()
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f.is_zero():
                continue
            for c in range(col, n):
                a[r][c] = a[r][c] - f * a[col][c]
    return det


def _mat_inverse(m, field: Field):
    n = len(m)
    a = [row[:] + [field.one() if i == j else field.zero() for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            raise GeometryError("singular metric")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


# -- core operations ----------------------------------------------------


def wedge(a: KForm, b: KForm) -> KForm:
    if a.n != b.n:
        raise GeometryError(f"dimension mismatch: {a.n} vs {b.n}")
    k = a.k + b.k
    if k > a.n:
        return KForm.zero(a.n, a.n, a.field)  # convention: top-degree zero
    acc: dict[int, Scalar] = {}
    zero = a.field.zero()
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            if ma & mb:
                continue
            s = _merge_sign(ma, mb)
            m = ma | mb
            term = ca * cb
            acc[m] = acc.get(m, zero) + (term if s > 0 else -term)
    return KForm(a.n, k, a.field, acc)


def interior(x: VectorField, a: KForm) -> KForm:
    if x.n != a.n:
        raise GeometryError(f"dimension mismatch: {x.n} vs {a.n}")
    if a.k == 0:
        return KForm.zero(a.n, 0, a.field)
    acc: dict[int, Scalar] = {}
    zero = a.field.zero()
    for m, c in a.coeffs.items():
        pos = 0
        mm = m
        while mm:
            low = mm & -mm
            i = low.bit_length()  # 1-based index
            comp = x.components[i - 1]
            if not comp.is_zero():
                term = c * comp
                if pos & 1:
                    term = -term
                nm = m ^ low
                acc[nm] = acc.get(nm, zero) + term
            pos += 1
            mm ^= low
    return KForm(a.n, a.k - 1, a.field, acc)


def form_inner(a: KForm, b: KForm, geom: FrameGeometry) -> Scalar:
    if a.k != b.k:
        raise GeometryError(f"degree mismatch: {a.k} vs {b.k}")
    acc = a.field.zero()
    if geom._is_identity:
        for m, ca in a.coeffs.items():
            cb = b.coeffs.get(m)
            if cb is not None:
                acc = acc + ca * cb
        return acc
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            g = geom.subset_gram(ma, mb)
            if not g.is_zero():
                acc = acc + ca * cb * g
    return acc


def hodge_star(a: KForm, geom: FrameGeometry) -> KForm:
    """Defined by alpha ^ star(b) = <alpha, b> vol for all alpha of degree k."""
    n, k = a.n, a.k
    full = (1 << n) - 1
    rho = geom.sqrt_det() * geom.orientation_sign
    acc: dict[int, Scalar] = {}
    zero = a.field.zero()
    if geom._is_identity:
        for m, c in a.coeffs.items():
            comp = full ^ m
            s = _merge_sign(m, comp)
            term = c * rho
            acc[comp] = term if s > 0 else -term
        return KForm(n, n - k, a.field, acc)
    # general metric: star(a) = rho * sum_I eps(I, I^c) <e^I, a> e^{I^c}
    for im in _masks(n, k):
        val = zero
        for mb, cb in a.coeffs.items():
            g = geom.subset_gram(im, mb)
            if not g.is_zero():
                val = val + cb * g
        if val.is_zero():
            continue
        comp = full ^ im
        s = _merge_sign(im, comp)
        term = val * rho
        acc[comp] = acc.get(comp, zero) + (term if s > 0 else -term)
    return KForm(n, n - k, a.field, acc)


def _masks(n: int, k: int):
    """All n-bit masks with k bits set, ascending."""
    if k == 0:
        yield 0
        return
    m = (1 << k) - 1
    top = 1 << n
    while m < top:
        yield m
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


def musical(x: VectorField, geom: FrameGeometry) -> KForm:
    """Flat: X -> g(X, .) as a 1-form."""
    comps = {}
    for j in range(geom.n):
        val = geom.field.zero()
        for i in range(geom.n):
            val = val + x.components[i] * geom.metric[i][j]
        if not val.is_zero():
            comps[1 << j] = val
    return KForm(geom.n, 1, geom.field, comps)


def musical_inv(a: KForm, geom: FrameGeometry) -> VectorField:
    """Sharp: degree-1 form -> vector via the inverse metric."""
    if a.k != 1:
        raise GeometryError("sharp needs a 1-form")
    ginv = geom.inverse_metric()
    comps = []
    for i in range(geom.n):
        val = geom.field.zero()
        for j in range(geom.n):
            c = a.coeffs.get(1 << j)
            if c is not None:
                val = val + ginv[i][j] * c
        comps.append(val)
    return VectorField(geom.n, geom.field, comps)


def two_form_square(f: KForm, geom: FrameGeometry):
    """F^2(X,Y) = <i_X F, i_Y F>; symmetric positive semi-definite matrix."""
    if f.k != 2:
        raise GeometryError("two_form_square needs a 2-form")
    n = f.n
    ifs = [interior(VectorField.basis(n, f.field, i), f) for i in range(1, n + 1)]
    return [
        [form_inner(ifs[i], ifs[j], geom) for j in range(n)]
        for i in range(n)
    ]


def contract_2_3(f: KForm, h: KForm, geom: FrameGeometry) -> KForm:
    """<F,H>(Z) = 1/2 sum_{a,b} F^{ab} H(e_a, e_b, Z), indices raised by g."""
    if f.k != 2 or h.k != 3:
        raise GeometryError("contract_2_3 needs degrees (2, 3)")
    n = f.n
    field = f.field
    ginv = geom.inverse_metric()
    # raise F's indices: F^{ab} = g^{ai} g^{bj} F_{ij}
    fup = [[field.zero() for _ in range(n)] for _ in range(n)]
    for m, c in f.coeffs.items():
        i, j = indices_of(m)
        for a in range(n):
            for b in range(n):
                term = ginv[a][i - 1] * ginv[b][j - 1] - ginv[a][j - 1] * ginv[b][i - 1]
                if not term.is_zero():
                    fup[a][b] = fup[a][b] + term * c
    comps: dict[int, Scalar] = {}
    half = field.scalar(Fraction(1, 2))
    for z in range(1, n + 1):
        val = field.zero()
        for a in range(n):
            for b in range(n):
                if fup[a][b].is_zero():
                    continue
                hval = h.coeff(a + 1, b + 1, z)
                if not hval.is_zero():
                    val = val + fup[a][b] * hval
        val = val * half
        if not val.is_zero():
            comps[1 << (z - 1)] = val
    return KForm(n, 1, field, comps)
