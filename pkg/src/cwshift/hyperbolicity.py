"""Numerical certification of hyperbolicity and interlacing.

A real homogeneous f is hyperbolic with respect to (1,0,0) when f(1,0,0) > 0
and every restriction lambda -> f(lambda, a, b) to a real direction is
real-rooted; it is strictly hyperbolic when those roots stay distinct off the
t-axis.  The checks here sample directions on the unit circle and classify
companion-matrix roots inside tolerance bands, so verdicts are probabilistic
rather than certificates; the bands are chosen to err toward "undetermined"
instead of a false negative.

The module also hosts the degree-preserving smoothing operator
f -> f - s^2 (x^2+y^2) d^2f/dt^2, whose d-fold iterate strictifies any
hyperbolic polynomial of degree d while preserving cyclic and dihedral
invariance, and the contraction path built from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, NumericalError
from .polyring import HomPoly

__all__ = [
    "HypVerdict",
    "InterlaceVerdict",
    "hyperbolicity_verdict",
    "interlacing_verdict",
    "nuij_step",
    "nuij_strictify",
    "retraction_point",
    "default_interlacer",
    "radial_product",
]

ROOT_TOL = 1e-7
UNDETERMINED_BAND = 10.0
DEFAULT_DIRECTIONS = 64
DIRECTION_SEED = 20260810

_FIXED_ANGLES = np.pi / 4.0 * np.arange(8)


def direction_set(num: int, seed: int = DIRECTION_SEED) -> np.ndarray:
    """Angles of unit directions: 8 fixed axes/diagonals plus seeded
    pseudo-random fill up to num."""
    if num <= len(_FIXED_ANGLES):
        return _FIXED_ANGLES[:num]
    rng = np.random.default_rng(seed)
    extra = rng.uniform(0.0, 2.0 * np.pi, size=num - len(_FIXED_ANGLES))
    return np.concatenate([_FIXED_ANGLES, extra])


@dataclass
class HypVerdict:
    """Outcome of a hyperbolicity sweep.

    status is one of strictly_hyperbolic, hyperbolic, not_hyperbolic,
    undetermined.  witness is a direction (a, b) on the unit circle
    exhibiting the failure, when there is one.
    """

    status: str
    witness: tuple[float, float] | None
    min_gap: float
    max_imag: float
    directions: int
    tol: float
    gap_tol: float

    @property
    def is_hyperbolic(self) -> bool:
        return self.status in ("strictly_hyperbolic", "hyperbolic")

    @property
    def is_strict(self) -> bool:
        return self.status == "strictly_hyperbolic"

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "min_gap": self.min_gap,
            "max_imag": self.max_imag,
            "directions": self.directions,
            "tol": self.tol,
            "gap_tol": self.gap_tol,
        }


@dataclass
class InterlaceVerdict:
    status: str  # strictly_interlacing | interlacing | not_interlacing | undetermined
    witness: tuple[float, float] | None
    min_separation: float
    max_violation: float
    directions: int
    tol: float

    @property
    def is_interlacing(self) -> bool:
        return self.status in ("strictly_interlacing", "interlacing")

    @property
    def is_strict(self) -> bool:
        return self.status == "strictly_interlacing"

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "min_separation": self.min_separation,
            "max_violation": self.max_violation,
            "directions": self.directions,
            "tol": self.tol,
        }


def _validate_real_poly(f: HomPoly, tol_scale: float = 1e-8):
    if f.realness_defect() > tol_scale * (1.0 + f.max_abs()):
        raise ValidationError("polynomial is not real-valued on real points")


def _direction_roots(f: HomPoly, angle: float) -> np.ndarray:
    a, b = np.cos(angle), np.sin(angle)
    coeffs = f.restrict_coeffs(a, b)
    # real-valued input: imaginary parts are evaluation noise
    return np.roots(coeffs.real[::-1])


def hyperbolicity_verdict(
    f: HomPoly,
    num_directions: int = DEFAULT_DIRECTIONS,
    tol: float = ROOT_TOL,
    seed: int = DIRECTION_SEED,
    gap_tol: float | None = None,
) -> HypVerdict:
    """Classify f by sampling restrictions to unit directions.

    Roots with |Im| <= tol*(1+|root|) count as real; |Im| beyond ten times
    that band is a definite failure with the direction reported as witness;
    anything in between yields "undetermined".  Strictness additionally
    requires all pairwise root gaps to exceed gap_tol*(1+max|root|) on every
    direction.
    """
    _validate_real_poly(f)
    if gap_tol is None:
        gap_tol = tol
    lead = f.lead()
    if abs(lead) <= 1e-12 * (1.0 + f.max_abs()):
        raise ValidationError("degenerate leading coefficient: f(1,0,0) is numerically zero")

    angles = direction_set(num_directions, seed)
    min_gap = np.inf
    max_imag = 0.0
    in_band = False
    gaps_ok = True
    band_witness = None
    for angle in angles:
        roots = _direction_roots(f, angle)
        scale = 1.0 + np.abs(roots)
        imag = np.abs(roots.imag)
        max_imag = max(max_imag, float(imag.max(initial=0.0)))
        bad = imag > tol * scale
        if np.any(imag > UNDETERMINED_BAND * tol * scale):
            return HypVerdict(
                "not_hyperbolic",
                (float(np.cos(angle)), float(np.sin(angle))),
                float(min_gap if np.isfinite(min_gap) else 0.0),
                max_imag,
                num_directions,
                tol,
                gap_tol,
            )
        if np.any(bad):
            in_band = True
            band_witness = (float(np.cos(angle)), float(np.sin(angle)))
            continue
        re = np.sort(roots.real)
        if len(re) > 1:
            gap = float(np.diff(re).min())
            min_gap = min(min_gap, gap)
            if gap <= gap_tol * (1.0 + float(np.abs(re).max())):
                gaps_ok = False

    if lead.real <= 0:
        # real-rooted restrictions but negative at the hyperbolicity point
        return HypVerdict("not_hyperbolic", None, float(min_gap if np.isfinite(min_gap) else 0.0),
                          max_imag, num_directions, tol, gap_tol)
    if in_band:
        return HypVerdict("undetermined", band_witness,
                          float(min_gap if np.isfinite(min_gap) else 0.0),
                          max_imag, num_directions, tol, gap_tol)
    # degree <= 1 restrictions have no gaps to collapse: vacuously strict
    return HypVerdict(
        "strictly_hyperbolic" if gaps_ok else "hyperbolic",
        None,
        float(min_gap) if np.isfinite(min_gap) else np.inf,
        max_imag,
        num_directions,
        tol,
        gap_tol,
    )


def interlacing_verdict(
    f: HomPoly,
    g: HomPoly,
    num_directions: int = DEFAULT_DIRECTIONS,
    tol: float = ROOT_TOL,
    seed: int = DIRECTION_SEED,
) -> InterlaceVerdict:
    """Check that on every sampled direction the sorted roots of g alternate
    with those of f.  Requires deg g == deg f - 1."""
    _validate_real_poly(f)
    _validate_real_poly(g)
    if g.degree != f.degree - 1:
        raise ValidationError("interlacer must have degree one less")

    angles = direction_set(num_directions, seed)
    min_sep = np.inf
    max_violation = 0.0
    witness = None
    undetermined = False
    sep_ok = True
    for angle in angles:
        rf = _direction_roots(f, angle)
        rg = _direction_roots(g, angle)
        scale = 1.0 + max(np.abs(rf).max(initial=0.0), np.abs(rg).max(initial=0.0))
        imax = max(np.abs(rf.imag).max(initial=0.0), np.abs(rg.imag).max(initial=0.0))
        if imax > UNDETERMINED_BAND * tol * scale:
            return InterlaceVerdict("not_interlacing",
                                    (float(np.cos(angle)), float(np.sin(angle))),
                                    0.0, imax, num_directions, tol)
        if imax > tol * scale:
            undetermined = True
            continue
        a = np.sort(rf.real)[::-1]
        b = np.sort(rg.real)[::-1]
        # descending alternation: a[i] >= b[i] >= a[i+1]
        viol = 0.0
        for i in range(len(b)):
            viol = max(viol, b[i] - a[i], a[i + 1] - b[i])
        max_violation = max(max_violation, viol)
        if viol > tol * scale:
            witness = (float(np.cos(angle)), float(np.sin(angle)))
            continue
        merged = np.sort(np.concatenate([a, b]))
        if len(merged) > 1:
            sep = float(np.diff(merged).min())
            min_sep = min(min_sep, sep)
            if sep <= tol * scale:
                sep_ok = False

    if witness is not None:
        return InterlaceVerdict("not_interlacing", witness,
                                float(min_sep if np.isfinite(min_sep) else 0.0),
                                max_violation, num_directions, tol)
    if undetermined:
        return InterlaceVerdict("undetermined", None,
                                float(min_sep if np.isfinite(min_sep) else 0.0),
                                max_violation, num_directions, tol)
    status = "strictly_interlacing" if sep_ok else "interlacing"
    return InterlaceVerdict(status, None,
                            float(min_sep if np.isfinite(min_sep) else 0.0),
                            max_violation, num_directions, tol)


# ---------------------------------------------------------------------------
# smoothing operator and contraction path
# ---------------------------------------------------------------------------


def nuij_step(f: HomPoly, s: float) -> HomPoly:
    """f - s^2 (x^2+y^2) * d^2 f / dt^2, exactly on coefficients.

    Each coefficient at (a, j, k) feeds -s^2 a (a-1) times itself into the
    slot (a-2, j+1, k+1), so degree, realness and invariance are preserved.
    """
    d = f.degree
    c = f.table().copy()
    s2 = float(s) * float(s)
    for a in range(2, d + 1):
        for j in range(d - a + 1):
            val = f.table()[a, j]
            if val != 0:
                c[a - 2, j + 1] -= s2 * a * (a - 1) * val
    return HomPoly(d, c)


def nuij_strictify(
    f: HomPoly,
    s: float,
    num_directions: int = DEFAULT_DIRECTIONS,
    tol: float = ROOT_TOL,
    check: bool = True,
) -> HomPoly:
    """Apply the smoothing step deg(f) times; the result of a hyperbolic
    input is strictly hyperbolic for any s > 0."""
    if s <= 0:
        raise ValidationError("strictification requires s > 0")
    if check:
        verdict = hyperbolicity_verdict(f, num_directions, tol)
        if not verdict.is_hyperbolic:
            raise ValidationError(f"input is {verdict.status}; refusing to strictify")
    out = f
    for _ in range(f.degree):
        out = nuij_step(out, s)
    if check:
        verdict = hyperbolicity_verdict(out, num_directions, tol)
        if not verdict.is_strict:
            raise NumericalError(
                f"smoothed polynomial failed the strictness sweep ({verdict.status}); "
                "try a larger s"
            )
    return out


def retraction_point(f: HomPoly, s: float) -> HomPoly:
    """Point at parameter s of the contraction path through f.

    The path first shrinks the (x, y) dependence, multiplying the (a, j, k)
    coefficient by s^(2(j+k)), then applies the smoothing step with
    parameter 1-s, deg(f) times.  At s=1 this returns f unchanged; at s=0
    the output is the common endpoint shared by all polynomials of the same
    degree; for s in [0, 1) the output of a hyperbolic invariant input is
    strictly hyperbolic.
    """
    if not (0.0 <= s <= 1.0):
        raise ValidationError("path parameter must lie in [0, 1]")
    d = f.degree
    c = f.table().copy()
    for a in range(d + 1):
        for j in range(d - a + 1):
            k = d - a - j
            c[a, j] *= float(s) ** (2 * (j + k))
    out = HomPoly(d, c)
    t = 1.0 - s
    for _ in range(d):
        out = nuij_step(out, t)
    return out


def default_interlacer(f: HomPoly) -> HomPoly:
    """(1/deg f) * df/dt: invariant whenever f is, and interlacing whenever f
    is hyperbolic.  Callers still need to verify the genericity assumptions
    and may perturb if they fail."""
    d = f.degree
    if d < 1:
        raise ValidationError("cannot interlace a constant")
    return f.dt().scale(1.0 / d)


def radial_product(radii, t_power: int = 0) -> HomPoly:
    """t^t_power * prod_i (t^2 - r_i (x^2 + y^2)): hyperbolic and invariant
    under every rotation order, strictly so when the r_i > 0 are distinct."""
    out = HomPoly.t_power(t_power)
    for r in radii:
        if r <= 0:
            raise ValidationError("radii must be positive")
        factor = HomPoly.from_terms(2, [(2, 0, 0, 1.0), (0, 1, 1, -float(r))])
        out = out * factor
    return out
