"""Complex projective intersection of plane curves and rotation-orbit splitting.

Intersections are computed in the y=1 chart by an evaluation/interpolation
resultant: both curves are restricted to t-polynomials at scaled roots of
unity in x, the Sylvester determinant is taken numerically at each node, and
the resultant in x is recovered by FFT interpolation.  Candidate points are
then rebuilt by matching common t-roots and polished by a few Newton steps
on the 2x2 system.  The line y=0 is handled by a direct univariate solve.

Orbit splitting groups intersection points into rotation orbits, pairs each
orbit with its conjugate, and deterministically assigns one of each pair to
the set S (with the reflection constraint in dihedral mode), emitting one
representative per orbit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionError,
    CommonComponentError,
    ConditioningError,
    ValidationError,
)
from .hyperbolicity import (
    HypVerdict,
    InterlaceVerdict,
    hyperbolicity_verdict,
    interlacing_verdict,
)
from .polyring import HomPoly, invariance_report

__all__ = [
    "ProjPoint",
    "OrbitSplit",
    "AssumptionReport",
    "intersect_curves",
    "check_assumptions",
    "orbit_split",
]

POINT_TOL = 1e-8
CLUSTER_RADIUS = 1e-6


@dataclass
class ProjPoint:
    """Point of the complex projective plane, normalized so the coordinate of
    largest modulus equals 1."""

    coords: np.ndarray
    multiplicity: int = 1
    at_infinity: bool = False
    non_reduced: bool = False

    @classmethod
    def from_coords(cls, t, x, y, multiplicity: int = 1, tol: float = POINT_TOL,
                    non_reduced: bool = False) -> "ProjPoint":
        c = np.array([t, x, y], dtype=complex)
        norms = np.abs(c)
        if norms.max() == 0:
            raise ValidationError("projective point cannot be the zero vector")
        c = c / c[int(np.argmax(norms))]
        return cls(c, multiplicity, bool(abs(c[0]) <= tol), non_reduced)

    @property
    def t(self) -> complex:
        return complex(self.coords[0])

    @property
    def x(self) -> complex:
        return complex(self.coords[1])

    @property
    def y(self) -> complex:
        return complex(self.coords[2])

    @property
    def u(self) -> complex:
        return complex(self.coords[1] + 1j * self.coords[2])

    @property
    def v(self) -> complex:
        return complex(self.coords[1] - 1j * self.coords[2])

    def rotate(self, n: int, k: int = 1) -> "ProjPoint":
        """Image under the rotation by k*2*pi/n acting on (t, x, y)."""
        alpha = 2.0 * np.pi * k / n
        ca, sa = np.cos(alpha), np.sin(alpha)
        t, x, y = self.coords
        return ProjPoint.from_coords(t, ca * x + sa * y, -sa * x + ca * y,
                                     self.multiplicity)

    def conj(self) -> "ProjPoint":
        t, x, y = self.coords
        return ProjPoint.from_coords(np.conj(t), np.conj(x), np.conj(y),
                                     self.multiplicity)

    def reflect(self) -> "ProjPoint":
        t, x, y = self.coords
        return ProjPoint.from_coords(t, x, -y, self.multiplicity)

    def proj_dist(self, other: "ProjPoint") -> float:
        """Distance up to complex scaling: norm of the phase-aligned
        difference of the unit representatives (well-conditioned near 0)."""
        a = self.coords / np.linalg.norm(self.coords)
        b = other.coords / np.linalg.norm(other.coords)
        ip = np.vdot(b, a)
        if abs(ip) < 1e-300:
            return float(np.sqrt(2.0))
        return float(np.linalg.norm(a - (ip / abs(ip)) * b))

    def is_real(self, tol: float = POINT_TOL) -> bool:
        return float(np.max(np.abs(self.coords.imag))) <= tol

    def sort_key(self):
        c = self.coords
        return (round(c[0].real, 9), round(c[0].imag, 9),
                round(c[1].real, 9), round(c[1].imag, 9),
                round(c[2].real, 9), round(c[2].imag, 9))

    def to_json_dict(self) -> dict:
        return {
            "t": [self.t.real, self.t.imag],
            "x": [self.x.real, self.x.imag],
            "y": [self.y.real, self.y.imag],
            "multiplicity": self.multiplicity,
            "at_infinity": self.at_infinity,
            "non_reduced": self.non_reduced,
        }

    def __repr__(self):
        return (f"ProjPoint([{self.t:.4g} : {self.x:.4g} : {self.y:.4g}], "
                f"mult={self.multiplicity})")


# ---------------------------------------------------------------------------
# chart restriction helpers
# ---------------------------------------------------------------------------


def _chart_t_coeffs(f: HomPoly, x) -> np.ndarray:
    """Coefficients in t of f(t, x, 1), ascending, vectorized over x values."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    d = f.degree
    u = x + 1j
    v = x - 1j
    upow = u[:, None] ** np.arange(d + 1)
    vpow = v[:, None] ** np.arange(d + 1)
    out = np.zeros((len(x), d + 1), dtype=complex)
    tab = f.table()
    for a in range(d + 1):
        m = d - a
        row = tab[a, :m + 1]
        if np.any(row != 0):
            out[:, a] = (row * upow[:, :m + 1] * vpow[:, m::-1]).sum(axis=1)
    return out


def _t_degree(f: HomPoly) -> int:
    """Exact t-degree in the y=1 chart: largest a with a nonzero table row."""
    tab = f.table()
    for a in range(f.degree, -1, -1):
        if np.any(tab[a, :f.degree - a + 1] != 0):
            return a
    return -1


def _sylvester_det(p: np.ndarray, q: np.ndarray, m: int, l: int) -> complex:
    """Determinant of the Sylvester matrix of p (declared degree m) and q
    (declared degree l); coefficient arrays ascending."""
    if m == 0 or l == 0:
        # resultant degenerates to powers of the constants
        pm = p[m] if m < len(p) else 0.0
        ql = q[l] if l < len(q) else 0.0
        return pm ** l * ql ** m
    size = m + l
    S = np.zeros((size, size), dtype=complex)
    prow = p[m::-1]
    qrow = q[l::-1]
    for i in range(l):
        S[i, i:i + m + 1] = prow
    for i in range(m):
        S[l + i, i:i + l + 1] = qrow
    return complex(np.linalg.det(S))


def _cluster_scalars(vals: np.ndarray, radius: float):
    """Group complex scalars within a relative radius; returns (center, count)."""
    order = np.lexsort((vals.imag, vals.real))
    groups: list[list[complex]] = []
    for idx in order:
        z = vals[idx]
        placed = False
        for g in groups:
            c = np.mean(g)
            if abs(z - c) <= radius * (1.0 + abs(c)):
                g.append(z)
                placed = True
                break
        if not placed:
            groups.append([z])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _trim_descending(coeffs: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Drop leading (highest-degree) coefficients that are relatively tiny."""
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        return coeffs[:1]
    keep = len(coeffs)
    while keep > 1 and abs(coeffs[keep - 1]) <= rel * scale:
        keep -= 1
    return coeffs[:keep]


def _newton_polish(f: HomPoly, g: HomPoly, t0: complex, x0: complex,
                   steps: int = 4):
    """A few Newton iterations on (f, g)(t, x, 1) = 0; returns the best
    (t, x, residual) seen, so a singular Jacobian cannot make things worse."""
    ft, fx = f.dt(), f.dx()
    gt, gx = g.dt(), g.dx()

    def val(p, t, x):
        return p.eval_xyz(t, x, 1.0)

    best = (t0, x0, abs(val(f, t0, x0)) + abs(val(g, t0, x0)))
    t, x = t0, x0
    for _ in range(steps):
        J = np.array([[val(ft, t, x), val(fx, t, x)],
                      [val(gt, t, x), val(gx, t, x)]], dtype=complex)
        rhs = np.array([val(f, t, x), val(g, t, x)], dtype=complex)
        try:
            delta = np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError:
            break
        t, x = t - delta[0], x - delta[1]
        res = abs(val(f, t, x)) + abs(val(g, t, x))
        if res < best[2]:
            best = (t, x, res)
        if res == 0:
            break
    return best[0], best[1]


def intersect_curves(
    f: HomPoly,
    g: HomPoly,
    tol: float = POINT_TOL,
    cluster_radius: float = CLUSTER_RADIUS,
    node_radius: float | None = None,
    polish: bool = True,
) -> list[ProjPoint]:
    """All intersection points of the projective curves f = 0 and g = 0,
    with estimated multiplicities.

    Raises CommonComponentError when the resultant collapses to zero and
    ConditioningError when the interpolated resultant fails its control
    evaluation at every node radius tried.
    """
    if f.degree < 1 or g.degree < 1:
        raise ValidationError("both curves must be nonconstant")
    df, dg = f.degree, g.degree
    scale_f = max(f.max_abs(), 1e-300)
    scale_g = max(g.max_abs(), 1e-300)
    fs = f.scale(1.0 / scale_f)
    gs = g.scale(1.0 / scale_g)

    mf, mg = _t_degree(fs), _t_degree(gs)
    if mf < 0 or mg < 0:
        raise ValidationError("zero polynomial has no intersection locus")

    radii = [node_radius] if node_radius is not None else [1.0, 0.5, 2.0]
    num = df * dg + 1
    res_coeffs = None
    for r in radii:
        nodes = r * np.exp(2j * np.pi * np.arange(num) / num)
        Fc = _chart_t_coeffs(fs, nodes)
        Gc = _chart_t_coeffs(gs, nodes)
        vals = np.array([
            _sylvester_det(Fc[i], Gc[i], mf, mg) for i in range(num)
        ])
        if np.max(np.abs(vals)) <= 1e-13 * num:
            raise CommonComponentError(
                "resultant vanishes identically: curves share a component"
            )
        # +2*pi*i sampling kernel: coefficient extraction is a forward FFT
        coeffs = np.fft.fft(vals) / num / (r ** np.arange(num))
        # control: re-evaluate at fresh angles and compare
        ctrl = r * np.exp(2j * np.pi * (np.arange(3) + 0.37) / num)
        Fc2 = _chart_t_coeffs(fs, ctrl)
        Gc2 = _chart_t_coeffs(gs, ctrl)
        direct = np.array([
            _sylvester_det(Fc2[i], Gc2[i], mf, mg) for i in range(3)
        ])
        interp = np.polyval(coeffs[::-1], ctrl)
        err = np.max(np.abs(direct - interp)) / (1.0 + np.max(np.abs(vals)))
        if err <= 1e-7:
            res_coeffs = coeffs
            break
    if res_coeffs is None:
        raise ConditioningError(
            f"resultant interpolation failed its control check (residual {err:.2e})"
        )

    points: list[ProjPoint] = []

    trimmed = _trim_descending(res_coeffs)
    if len(trimmed) > 1:
        xroots = np.roots(trimmed[::-1])
        for x0, mult_x in _cluster_scalars(xroots, cluster_radius):
            # A common t is a root of one restriction making the other vanish.
            # Cross-evaluation beats root-to-root matching: a multiple root
            # splits its own root cluster by ~sqrt(eps) but barely moves the
            # other polynomial's value.
            tF = np.roots(_trim_descending(_chart_t_coeffs(fs, x0)[0])[::-1])
            tG = np.roots(_trim_descending(_chart_t_coeffs(gs, x0)[0])[::-1])
            cands: list[tuple[float, complex]] = []
            for roots_of, other, deg_other in ((tF, gs, dg), (tG, fs, df)):
                for b in roots_of:
                    box = (1.0 + abs(b) ** 2 + abs(x0) ** 2) ** (deg_other / 2.0)
                    resid = abs(other.eval_xyz(b, x0, 1.0)) / box
                    if resid <= 1e-8:
                        cands.append((resid, complex(b)))
            if not cands:
                continue  # ghost root of the resultant (leading-coeff drop)
            # cluster candidates, rank clusters by residual, keep at most
            # mult_x: an x-root of multiplicity m carries m points counted
            # with multiplicity, so extras are near-misses
            t_clusters: list[list[tuple[float, complex]]] = []
            for resid, t0 in sorted(cands, key=lambda c: (c[0], c[1].real, c[1].imag)):
                for cl in t_clusters:
                    if abs(t0 - cl[0][1]) <= 100 * cluster_radius * (1.0 + abs(t0)):
                        cl.append((resid, t0))
                        break
                else:
                    t_clusters.append([(resid, t0)])
            t_clusters = t_clusters[:mult_x]
            non_reduced = mult_x > len(t_clusters)
            base, extra = divmod(mult_x, len(t_clusters))
            for i, cl in enumerate(t_clusters):
                t0 = cl[0][1]  # best-residual member
                mult = base + (1 if i < extra else 0)
                if polish and not non_reduced:
                    t0, x1 = _newton_polish(fs, gs, t0, x0)
                else:
                    x1 = x0
                points.append(ProjPoint.from_coords(
                    t0, x1, 1.0, multiplicity=max(mult, 1), tol=tol,
                    non_reduced=non_reduced))

    # the line y = 0: common roots of the binary forms f(t, x, 0), g(t, x, 0)
    pf = np.array([fs.table()[a, :df - a + 1].sum() for a in range(df + 1)])
    pg = np.array([gs.table()[a, :dg - a + 1].sum() for a in range(dg + 1)])
    rf = np.roots(_trim_descending(pf)[::-1]) if len(_trim_descending(pf)) > 1 else np.array([])
    rg = np.roots(_trim_descending(pg)[::-1]) if len(_trim_descending(pg)) > 1 else np.array([])
    for a in rf:
        close = rg[np.abs(rg - a) <= cluster_radius * 10 * (1.0 + abs(a))] if len(rg) else []
        if len(close):
            points.append(ProjPoint.from_coords((a + close[0]) / 2.0, 1.0, 0.0, tol=tol))

    points.sort(key=ProjPoint.sort_key)
    return points


# ---------------------------------------------------------------------------
# assumption checks
# ---------------------------------------------------------------------------


@dataclass
class AssumptionReport:
    """Numerical status of the four genericity assumptions for a pair (f, g)."""

    hyperbolicity: HypVerdict
    smooth: bool
    invariant_f: bool
    invariant_g: bool
    interlacing: InterlaceVerdict
    point_count: int
    total_multiplicity: int
    max_multiplicity: int
    min_transversality: float
    infinity_count: int
    infinity_expected: int
    a1: bool = field(init=False)
    a2: bool = field(init=False)
    a3: bool = field(init=False)
    a4: bool = field(init=False)

    bezout: int = 0

    def __post_init__(self):
        self.a1 = self.hyperbolicity.is_strict and self.smooth and self.invariant_f
        self.a2 = self.interlacing.is_interlacing and self.invariant_g
        self.a3 = (
            self.total_multiplicity == self.bezout
            and self.max_multiplicity == 1
            and self.min_transversality > 0
        )
        self.a4 = self.infinity_count == self.infinity_expected

    @property
    def passed(self) -> bool:
        return self.a1 and self.a2 and self.a3 and self.a4

    def to_json_dict(self) -> dict:
        return {
            "a1": self.a1,
            "a2": self.a2,
            "a3": self.a3,
            "a4": self.a4,
            "passed": self.passed,
            "hyperbolicity": self.hyperbolicity.to_json_dict(),
            "smooth": self.smooth,
            "invariant_f": self.invariant_f,
            "invariant_g": self.invariant_g,
            "interlacing": self.interlacing.to_json_dict(),
            "point_count": self.point_count,
            "total_multiplicity": self.total_multiplicity,
            "max_multiplicity": self.max_multiplicity,
            "min_transversality": self.min_transversality,
            "infinity_count": self.infinity_count,
            "infinity_expected": self.infinity_expected,
            "bezout": self.bezout,
        }


def _is_smooth(f: HomPoly, tol: float = 1e-9) -> bool:
    """No common projective zero of the three partials (then none of f either,
    by the Euler relation).

    Candidates are Newton-polished common roots of (f_t, f_x), so a true
    singularity evaluates f_y and f at ~1e-14 scale; the threshold only has
    to separate that from near-singular-but-workable instances (~1e-7).
    """
    ft, fx, fy = f.dt(), f.dx(), f.dy()
    if ft.is_zero(1e-14) or fx.is_zero(1e-14):
        return False
    try:
        candidates = intersect_curves(ft, fx)
    except CommonComponentError:
        return False
    scale_y = max(fy.max_abs(), 1e-300)
    scale_f = max(f.max_abs(), 1e-300)
    for p in candidates:
        t, x, y = p.coords
        if abs(fy.eval_xyz(t, x, y)) <= tol * scale_y and \
           abs(f.eval_xyz(t, x, y)) <= tol * scale_f:
            return False
    return True


def _transversality_margin(f: HomPoly, g: HomPoly, points) -> float:
    """Smallest singular value, over intersection points, of the 2x3 matrix of
    projective gradients, normalized by the gradient scales."""
    grads_f = (f.dt(), f.dx(), f.dy())
    grads_g = (g.dt(), g.dx(), g.dy())
    worst = np.inf
    for p in points:
        t, x, y = p.coords
        gf = np.array([q.eval_xyz(t, x, y) for q in grads_f])
        gg = np.array([q.eval_xyz(t, x, y) for q in grads_g])
        nf = max(np.linalg.norm(gf), 1e-300)
        ng = max(np.linalg.norm(gg), 1e-300)
        sv = np.linalg.svd(np.vstack([gf / nf, gg / ng]), compute_uv=False)
        worst = min(worst, float(sv[-1]))
    return float(worst) if np.isfinite(worst) else 0.0


def check_assumptions(
    f: HomPoly,
    g: HomPoly,
    n: int,
    tol: float = POINT_TOL,
    transversality_tol: float = 1e-6,
) -> AssumptionReport:
    """Report-only verification of strict hyperbolicity and smoothness of f,
    interlacing of g, transversality of the intersection, and the expected
    count of intersection points on the line t = 0."""
    if g.degree != f.degree - 1:
        raise ValidationError("expected deg g == deg f - 1")
    rep_f = invariance_report(f, n)
    rep_g = invariance_report(g, n)
    verdict = hyperbolicity_verdict(f)
    smooth = _is_smooth(f)
    inter = interlacing_verdict(f, g)
    try:
        points = intersect_curves(f, g, tol=tol)
    except CommonComponentError:
        points = []
    total = sum(p.multiplicity for p in points)
    maxmult = max((p.multiplicity for p in points), default=0)
    margin = _transversality_margin(f, g, points)
    if margin <= transversality_tol:
        margin = 0.0
    inf_count = sum(1 for p in points if p.at_infinity)
    expected = 0 if n % 2 == 1 else f.degree
    report = AssumptionReport(
        hyperbolicity=verdict,
        smooth=smooth,
        invariant_f=rep_f.is_real_valued and rep_f.is_cn_invariant,
        invariant_g=rep_g.is_real_valued and rep_g.is_cn_invariant,
        interlacing=inter,
        point_count=len(points),
        total_multiplicity=total,
        max_multiplicity=maxmult,
        min_transversality=margin,
        infinity_count=inf_count,
        infinity_expected=expected,
        bezout=f.degree * g.degree,
    )
    return report


# ---------------------------------------------------------------------------
# orbit splitting
# ---------------------------------------------------------------------------


@dataclass
class OrbitSplit:
    """Partition of intersection points into conjugate families of rotation
    orbits, with a minimal representative set for the S side."""

    orbits: list[list[ProjPoint]]
    s_ids: list[int]
    sbar_ids: list[int]
    representatives: list[ProjPoint]
    order: int
    dihedral: bool

    @property
    def s_points(self) -> list[ProjPoint]:
        return [p for i in self.s_ids for p in self.orbits[i]]

    @property
    def sbar_points(self) -> list[ProjPoint]:
        return [p for i in self.sbar_ids for p in self.orbits[i]]

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "dihedral": self.dihedral,
            "orbit_sizes": [len(o) for o in self.orbits],
            "s_ids": self.s_ids,
            "sbar_ids": self.sbar_ids,
            "representatives": [p.to_json_dict() for p in self.representatives],
        }


def _find_orbit(target: ProjPoint, orbits, tol: float):
    for idx, orbit in enumerate(orbits):
        for p in orbit:
            if target.proj_dist(p) <= tol:
                return idx
    return None


def orbit_split(
    points: list[ProjPoint],
    n: int,
    dihedral: bool = False,
    tol: float = POINT_TOL,
) -> OrbitSplit:
    """Group points into rotation orbits and split them into two disjoint
    conjugate families S and conj(S), returning one representative per orbit
    of S.

    The input must be closed under rotation and conjugation within tolerance
    and contain no real points.  In dihedral mode orbits are processed in
    quadruples {O, conj O, ref O, ref conj O} (collapsing coincidences) so
    that additionally ref(conj(S)) = S.
    """
    match_tol = tol
    pts = sorted(points, key=ProjPoint.sort_key)
    for p in pts:
        if p.is_real(tol):
            raise AssumptionError(f"real intersection point {p} admits no conjugate split")

    unused = list(pts)
    orbits: list[list[ProjPoint]] = []
    while unused:
        seed = unused.pop(0)
        orbit = [seed]
        current = seed
        for _ in range(2 * n + 1):
            current = current.rotate(n)
            if current.proj_dist(seed) <= match_tol:
                break
            hit = None
            for i, q in enumerate(unused):
                if current.proj_dist(q) <= match_tol:
                    hit = i
                    break
            if hit is None:
                raise AssumptionError(
                    "point set is not closed under rotation within tolerance"
                )
            orbit.append(unused.pop(hit))
        else:
            raise AssumptionError("rotation orbit failed to close")
        orbits.append(orbit)

    def orbit_of(point: ProjPoint) -> int:
        idx = _find_orbit(point, orbits, match_tol)
        if idx is None:
            raise AssumptionError(
                "point set is not closed under conjugation/reflection within tolerance"
            )
        return idx

    def rep_key(ids):
        return min(p.sort_key() for i in ids for p in orbits[i])

    def first_nonreal_imag_positive(ids) -> bool | None:
        key_pt = min((p for i in ids for p in orbits[i]), key=ProjPoint.sort_key)
        for c in key_pt.coords:
            if abs(c.imag) > tol:
                return c.imag > 0
        return None

    assigned: dict[int, str] = {}
    s_ids: list[int] = []
    sbar_ids: list[int] = []
    for idx in range(len(orbits)):
        if idx in assigned:
            continue
        rep = orbits[idx][0]
        conj_idx = orbit_of(rep.conj())
        if conj_idx == idx:
            raise AssumptionError(
                "an orbit meets its own conjugate; the conjugate split does not exist"
            )
        if dihedral:
            # quadruple {O, conj O, ref O, ref conj O}; ref conj O may equal O
            ref_idx = orbit_of(rep.reflect())
            refconj_idx = orbit_of(rep.conj().reflect())
            side_a = sorted({idx, refconj_idx})
            side_b = sorted({conj_idx, ref_idx})
            if set(side_a) & set(side_b):
                raise AssumptionError(
                    "an orbit meets its own reflection or conjugate; no dihedral split"
                )
        else:
            side_a = [idx]
            side_b = [conj_idx]
        fa = first_nonreal_imag_positive(side_a)
        fb = first_nonreal_imag_positive(side_b)
        if fa is True and fb is not True:
            chosen, other = side_a, side_b
        elif fb is True and fa is not True:
            chosen, other = side_b, side_a
        else:
            chosen, other = (side_a, side_b) if rep_key(side_a) <= rep_key(side_b) else (side_b, side_a)
        for i in chosen:
            if assigned.get(i) == "sbar":
                raise AssumptionError("inconsistent orbit assignment")
            assigned[i] = "s"
        for i in other:
            if assigned.get(i) == "s":
                raise AssumptionError("inconsistent orbit assignment")
            assigned[i] = "sbar"
        s_ids.extend(chosen)
        sbar_ids.extend(other)

    reps = [min(orbits[i], key=ProjPoint.sort_key) for i in sorted(s_ids)]
    return OrbitSplit(
        orbits=orbits,
        s_ids=sorted(s_ids),
        sbar_ids=sorted(sbar_ids),
        representatives=reps,
        order=n,
        dihedral=dihedral,
    )
