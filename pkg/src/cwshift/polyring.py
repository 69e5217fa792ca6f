"""Homogeneous trivariate polynomials in the basis t^a (x+iy)^j (x-iy)^k.

Working in coordinates (t, u, v) = (t, x+iy, x-iy) makes the planar
rotation group act diagonally on monomials, so cyclic or dihedral
symmetry of a polynomial shows up directly in its coefficient support:
a polynomial is invariant under rotation by 2*pi/n exactly when every
monomial satisfies j == k (mod n), and it takes real values on real
(t, x, y) exactly when c[a,j,k] == conj(c[a,k,j]).

Coefficients are always stored complex, even for real polynomials;
realness is a checked property of the table, not a separate type.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError

__all__ = [
    "HomPoly",
    "GroupElement",
    "InvarianceReport",
    "act_group",
    "eigenspace_project",
    "eigenspace_dimension",
    "eigenspace_monomials",
    "invariance_report",
    "poly_to_dict",
    "poly_from_dict",
    "rel_inf_diff",
]


@lru_cache(maxsize=64)
def _phase_table(n: int) -> np.ndarray:
    """Unit phases exp(2*pi*i*e/n) for e = 0..n-1, shared so that repeated
    group actions reuse bit-identical values."""
    return np.exp(2j * np.pi * np.arange(n) / n)


class HomPoly:
    """Dense homogeneous polynomial of fixed degree in (t, u, v).

    The coefficient of t^a * u^j * v^k is stored at table[a, j] with
    k = degree - a - j implied; entries with a + j > degree are unused
    and kept at zero.
    """

    __slots__ = ("degree", "_c")

    def __init__(self, degree: int, table: np.ndarray | None = None):
        if degree < 0:
            raise ValidationError("degree must be non-negative")
        self.degree = int(degree)
        m = self.degree + 1
        if table is None:
            c = np.zeros((m, m), dtype=complex)
        else:
            c = np.array(table, dtype=complex)
            if c.shape != (m, m):
                raise ValidationError(
                    f"coefficient table shape {c.shape} does not match degree {degree}"
                )
            a_idx, j_idx = np.indices(c.shape)
            if np.any(c[a_idx + j_idx > degree] != 0):
                raise ValidationError("coefficients outside a+j+k = degree")
        c.setflags(write=False)
        self._c = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, degree: int) -> "HomPoly":
        return cls(degree)

    @classmethod
    def monomial(cls, a: int, j: int, k: int, coeff: complex = 1.0) -> "HomPoly":
        if min(a, j, k) < 0:
            raise ValidationError("negative exponent")
        d = a + j + k
        c = np.zeros((d + 1, d + 1), dtype=complex)
        c[a, j] = coeff
        return cls(d, c)

    @classmethod
    def from_terms(cls, degree: int, terms) -> "HomPoly":
        """Build from an iterable of (a, j, k, coeff); exponents must sum to degree."""
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for a, j, k, coeff in terms:
            if a < 0 or j < 0 or k < 0 or a + j + k != degree:
                raise ValidationError(f"exponent triple {(a, j, k)} incompatible with degree {degree}")
            c[a, j] += coeff
        return cls(degree, c)

    @classmethod
    def t_power(cls, degree: int) -> "HomPoly":
        return cls.monomial(degree, 0, 0, 1.0)

    # -- basic structure ---------------------------------------------------

    def coeff(self, a: int, j: int, k: int) -> complex:
        if a < 0 or j < 0 or k < 0 or a + j + k != self.degree:
            raise ValidationError(f"exponent triple {(a, j, k)} incompatible with degree {self.degree}")
        return complex(self._c[a, j])

    def lead(self) -> complex:
        """Coefficient of t^degree, the value at (1, 0, 0)."""
        return complex(self._c[self.degree, 0])

    def terms(self):
        """Yield (a, j, k, coeff) over nonzero coefficients, lexicographic in (a, j)."""
        d = self.degree
        for a in range(d + 1):
            for j in range(d - a + 1):
                c = self._c[a, j]
                if c != 0:
                    yield a, j, d - a - j, complex(c)

    def table(self) -> np.ndarray:
        """Read-only view of the (a, j) coefficient table."""
        return self._c

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def __repr__(self):
        nterms = int(np.count_nonzero(self._c))
        return f"HomPoly(degree={self.degree}, terms={nterms})"

    # -- arithmetic --------------------------------------------------------

    def _require_same_degree(self, other: "HomPoly"):
        if self.degree != other.degree:
            raise ValidationError(
                f"degree mismatch: {self.degree} vs {other.degree}"
            )

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._require_same_degree(other)
        return HomPoly(self.degree, self._c + other._c)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        self._require_same_degree(other)
        return HomPoly(self.degree, self._c - other._c)

    def __neg__(self) -> "HomPoly":
        return HomPoly(self.degree, -self._c)

    def scale(self, s: complex) -> "HomPoly":
        return HomPoly(self.degree, self._c * s)

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            d = self.degree + other.degree
            out = np.zeros((d + 1, d + 1), dtype=complex)
            m2 = other.degree + 1
            for a in range(self.degree + 1):
                for j in range(self.degree - a + 1):
                    c = self._c[a, j]
                    if c != 0:
                        out[a:a + m2, j:j + m2] += c * other._c
            return HomPoly(d, out)
        return self.scale(other)

    __rmul__ = __mul__

    def conjugate(self) -> "HomPoly":
        """The polynomial whose values on real (t, x, y) are the complex
        conjugates of this one's: conjugate coefficients and swap j <-> k.

        Fixed points of this involution are exactly the real-valued polynomials.
        """
        return HomPoly(self.degree, _swap_jk(self._c, self.degree).conj())

    def real_part(self) -> "HomPoly":
        """(f + conj(f))/2, the real-valued part on real points."""
        return (self + self.conjugate()).scale(0.5)

    def normalized(self) -> "HomPoly":
        """Rescale so the coefficient of t^degree equals 1."""
        lead = self.lead()
        if abs(lead) <= 1e-14 * (1.0 + self.max_abs()):
            raise ValidationError("leading t-coefficient is numerically zero")
        return self.scale(1.0 / lead)

    def chop(self, tol: float) -> "HomPoly":
        """Zero out coefficients below tol (absolute)."""
        c = self._c.copy()
        c[np.abs(c) <= tol] = 0.0
        return HomPoly(self.degree, c)

    # -- calculus ----------------------------------------------------------

    def dt(self) -> "HomPoly":
        d = self.degree
        if d == 0:
            return HomPoly(0)
        out = np.zeros((d, d), dtype=complex)
        for a in range(1, d + 1):
            out[a - 1, :d - a + 1] = a * self._c[a, :d - a + 1]
        return HomPoly(d - 1, out)

    def du(self) -> "HomPoly":
        d = self.degree
        if d == 0:
            return HomPoly(0)
        out = np.zeros((d, d), dtype=complex)
        for a in range(d):
            for j in range(1, d - a + 1):
                out[a, j - 1] = j * self._c[a, j]
        return HomPoly(d - 1, out)

    def dv(self) -> "HomPoly":
        d = self.degree
        if d == 0:
            return HomPoly(0)
        out = np.zeros((d, d), dtype=complex)
        for a in range(d):
            for j in range(d - a):
                k = d - a - j
                out[a, j] = k * self._c[a, j]
        return HomPoly(d - 1, out)

    def dx(self) -> "HomPoly":
        return self.du() + self.dv()

    def dy(self) -> "HomPoly":
        return (self.du() - self.dv()).scale(1j)

    # -- evaluation --------------------------------------------------------

    def eval_tuv(self, t, u, v):
        """Evaluate at (t, u, v); arguments broadcast like numpy arrays."""
        t = np.asarray(t, dtype=complex)
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        out = np.zeros(np.broadcast(t, u, v).shape, dtype=complex)
        for a, j, k, c in self.terms():
            out = out + c * t**a * u**j * v**k
        if out.shape == ():
            return complex(out)
        return out

    def eval_xyz(self, t, x, y):
        """Evaluate at projective coordinates (t, x, y), possibly complex."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return self.eval_tuv(t, x + 1j * y, x - 1j * y)

    def restrict_coeffs(self, a: float, b: float) -> np.ndarray:
        """Coefficients of lambda -> f(lambda, a, b), ascending in lambda."""
        d = self.degree
        u0 = complex(a, b)
        v0 = complex(a, -b)
        upow = u0 ** np.arange(d + 1)
        vpow = v0 ** np.arange(d + 1)
        out = np.zeros(d + 1, dtype=complex)
        for m in range(d + 1):
            row = self._c[m, :d - m + 1]
            out[m] = np.sum(row * upow[:d - m + 1] * vpow[d - m::-1])
        return out

    # -- structure checks ----------------------------------------------------

    def realness_defect(self) -> float:
        """Max deviation from c[a,j,k] == conj(c[a,k,j])."""
        return float(np.max(np.abs(self._c - _swap_jk(self._c, self.degree).conj())))

    def rotation_defect(self, n: int) -> float:
        """Max magnitude over coefficients that rotation invariance forbids."""
        mask = _residue_mask(self.degree, n, 0)
        off = np.abs(self._c)[~mask]
        return float(off.max()) if off.size else 0.0

    def reflection_defect(self) -> float:
        """Max deviation from c[a,j,k] == c[a,k,j]."""
        return float(np.max(np.abs(self._c - _swap_jk(self._c, self.degree))))

    def imag_coeff_max(self) -> float:
        """Largest imaginary part over the (t, u, v) coefficient table."""
        return float(np.max(np.abs(self._c.imag)))

    def with_real_coeffs(self) -> "HomPoly":
        return HomPoly(self.degree, self._c.real.astype(complex))


def _swap_jk(c: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros_like(c)
    for a in range(degree + 1):
        m = degree - a
        out[a, :m + 1] = c[a, :m + 1][::-1]
    return out


@lru_cache(maxsize=256)
def _residue_mask_cached(degree: int, n: int, ell: int):
    a_idx, j_idx = np.indices((degree + 1, degree + 1))
    k_idx = degree - a_idx - j_idx
    mask = (k_idx >= 0) & ((j_idx - k_idx - ell) % n == 0)
    mask.setflags(write=False)
    return mask


def _residue_mask(degree: int, n: int, ell: int) -> np.ndarray:
    """Boolean table of valid (a, j) slots with j - k == ell (mod n)."""
    return _residue_mask_cached(degree, n, ell % n)


# ---------------------------------------------------------------------------
# group action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """Symmetry of the polynomial ring: rotation power, optional reflection,
    optional coefficient conjugation.

    An element acts on polynomials in the normal form rot^k . ref^r . conj^c
    (rightmost factor applied first).  Composition follows the dihedral
    relation ref . rot == rot^-1 . ref, and conjugation is central.
    """

    order: int
    rot: int = 0
    ref: bool = False
    conj: bool = False

    def __post_init__(self):
        if self.order < 1:
            raise ValidationError("group order must be at least 1")
        object.__setattr__(self, "rot", self.rot % self.order)

    @classmethod
    def identity(cls, order: int) -> "GroupElement":
        return cls(order)

    @classmethod
    def rotation(cls, order: int, k: int = 1) -> "GroupElement":
        return cls(order, rot=k)

    @classmethod
    def reflection(cls, order: int) -> "GroupElement":
        return cls(order, ref=True)

    @classmethod
    def conjugation(cls, order: int) -> "GroupElement":
        return cls(order, conj=True)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        """Composition self . other: acting by the product applies other first."""
        if self.order != other.order:
            raise ValidationError("cannot compose elements of different order")
        sign = -1 if self.ref else 1
        return GroupElement(
            self.order,
            rot=self.rot + sign * other.rot,
            ref=self.ref ^ other.ref,
            conj=self.conj ^ other.conj,
        )

    def inverse(self) -> "GroupElement":
        sign = -1 if self.ref else 1
        return GroupElement(self.order, rot=-sign * self.rot, ref=self.ref, conj=self.conj)


def act_group(f: HomPoly, gamma: GroupElement) -> HomPoly:
    """Apply a symmetry to a polynomial.

    On the coefficient table: rotation by k multiplies c[a,j,k] with the
    unit phase of exponent k*(k_exp - j_exp) mod n, reflection swaps
    j <-> k, and conjugation conjugates coefficients and swaps j <-> k.
    """
    d = f.degree
    c = f.table().copy()
    if gamma.conj:
        c = _swap_jk(c, d).conj()
    if gamma.ref:
        c = _swap_jk(c, d)
    if gamma.rot:
        n = gamma.order
        phases = _phase_table(n)
        a_idx, j_idx = np.indices(c.shape)
        k_idx = d - a_idx - j_idx
        expo = (gamma.rot * (k_idx - j_idx)) % n
        valid = k_idx >= 0
        c[valid] = c[valid] * phases[expo[valid]]
    return HomPoly(d, c)


# ---------------------------------------------------------------------------
# rotation eigenspaces
# ---------------------------------------------------------------------------


def eigenspace_project(f: HomPoly, ell: int, n: int) -> HomPoly:
    """Component of f with j - k == ell (mod n); the projections over all
    residues sum back to f exactly."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    mask = _residue_mask(f.degree, n, ell)
    c = np.where(mask, f.table(), 0.0)
    return HomPoly(f.degree, c)


def eigenspace_monomials(n: int, degree: int, ell: int) -> list[tuple[int, int, int]]:
    """Exponent triples (a, j, k) spanning the residue-ell eigenspace,
    lexicographic in (a, j)."""
    out = []
    for a in range(degree + 1):
        for j in range(degree - a + 1):
            k = degree - a - j
            if (j - k - ell) % n == 0:
                out.append((a, j, k))
    return out


def eigenspace_dimension(n: int, degree: int, ell: int) -> int:
    """Number of monomials t^a u^j v^k of the given degree with
    j - k == ell (mod n), by direct lattice-point enumeration."""
    if n < 1 or degree < 0:
        raise ValidationError("need n >= 1 and degree >= 0")
    count = 0
    for j in range(degree + 1):
        for k in range(degree - j + 1):
            if (j - k - ell) % n == 0:
                count += 1
    return count


# ---------------------------------------------------------------------------
# invariance reporting
# ---------------------------------------------------------------------------


@dataclass
class InvarianceReport:
    degree: int
    order: int
    lead: complex
    is_real_valued: bool
    is_cn_invariant: bool
    is_dihedral_invariant: bool
    realness_defect: float
    rotation_defect: float
    reflection_defect: float
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "order": self.order,
            "lead": [self.lead.real, self.lead.imag],
            "is_real_valued": self.is_real_valued,
            "is_cn_invariant": self.is_cn_invariant,
            "is_dihedral_invariant": self.is_dihedral_invariant,
            "realness_defect": self.realness_defect,
            "rotation_defect": self.rotation_defect,
            "reflection_defect": self.reflection_defect,
            "tol": self.tol,
        }


def invariance_report(f: HomPoly, n: int, tol_scale: float = 1e-10) -> InvarianceReport:
    """Classify realness and cyclic/dihedral invariance from the coefficient
    pattern, thresholded at tol_scale * (1 + max |coeff|)."""
    if f.is_zero():
        raise ValidationError("invariance_report requires a nonzero polynomial")
    tol = tol_scale * (1.0 + f.max_abs())
    real_defect = f.realness_defect()
    rot_defect = f.rotation_defect(n)
    ref_defect = f.reflection_defect()
    real_ok = real_defect <= tol
    cn_ok = rot_defect <= tol
    return InvarianceReport(
        degree=f.degree,
        order=n,
        lead=f.lead(),
        is_real_valued=real_ok,
        is_cn_invariant=cn_ok,
        is_dihedral_invariant=cn_ok and ref_defect <= tol,
        realness_defect=real_defect,
        rotation_defect=rot_defect,
        reflection_defect=ref_defect,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def poly_to_dict(f: HomPoly, real_tol_scale: float = 1e-10) -> dict:
    """JSON-ready form: degree plus nonzero terms in lexicographic (a, j) order.

    If the polynomial is real-valued within tolerance, coefficients are
    symmetrized first so that conjugate term pairs serialize bit-identically.
    """
    g = f
    if f.realness_defect() <= real_tol_scale * (1.0 + f.max_abs()):
        g = f.real_part()
    terms = [
        {"a": a, "j": j, "k": k, "re": c.real, "im": c.imag}
        for a, j, k, c in g.terms()
    ]
    return {"degree": g.degree, "terms": terms}


def poly_from_dict(data: dict) -> HomPoly:
    try:
        degree = int(data["degree"])
        terms = [
            (int(t["a"]), int(t["j"]), int(t["k"]), complex(float(t["re"]), float(t.get("im", 0.0))))
            for t in data["terms"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed polynomial dictionary: {exc}") from exc
    return HomPoly.from_terms(degree, terms)


def rel_inf_diff(f: HomPoly, g: HomPoly) -> float:
    """max |f - g| coefficientwise, relative to max |g|."""
    if f.degree != g.degree:
        raise ValidationError("degree mismatch")
    denom = max(g.max_abs(), 1e-300)
    return float(np.max(np.abs(f.table() - g.table()))) / denom
