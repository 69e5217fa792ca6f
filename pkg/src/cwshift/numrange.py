"""Numerical ranges, their boundary generating curves, and synthesis.

The polynomial F_A = det(t I + (u/2) A^* + (v/2) A) ties a matrix to a
hyperbolic plane curve; the numerical range of A is the convex hull of the
real affine part of that curve's dual (Kippenhahn), which an eigenvalue
sweep of Re(e^{-i theta} A) samples directly: the support function is the
top eigenvalue and the boundary point is the top eigenvector's quadratic
form.  Rank-k ranges use the k-th eigenvalue sweep as a half-plane
description.

synthesize_invariant_cws closes the loop: given any matrix whose numerical
range is invariant under rotation by 2 pi / n, it produces a block cyclic
weighted shift matrix with the same range, either directly from F_B when
that is already invariant or by fitting the minimal invariant curve through
the extreme boundary data and running the determinantal construction on a
t-padded multiple.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .detrep import BlockCWS, ConstructDiagnostics, construct_cws
from .errors import ConditioningError, NumericalError, ValidationError
from .hyperbolicity import hyperbolicity_verdict
from .polyring import HomPoly, invariance_report, rel_inf_diff

__all__ = [
    "RangeSample",
    "KippenhahnSamples",
    "WkRange",
    "SynthesisDiagnostics",
    "char_poly",
    "support_sweep",
    "kippenhahn_samples",
    "detect_symmetry",
    "higher_rank_range",
    "synthesize_invariant_cws",
    "curve_samples",
]


def _as_matrix(A) -> np.ndarray:
    mat = A.matrix if isinstance(A, BlockCWS) else np.array(A, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError("expected a square matrix")
    return mat


def char_poly(A) -> HomPoly:
    """F_A = det(t I + (u/2) A^* + (v/2) A) as a degree-d polynomial.

    Interpolates det values on a scaled roots-of-unity tensor grid in (u, v)
    at t = 1 and reads coefficients off a 2-D inverse FFT; conjugate
    symmetry (real-valuedness) is enforced by averaging afterwards.
    """
    mat = _as_matrix(A)
    d = mat.shape[0]
    if d == 0:
        raise ValidationError("empty matrix")
    Astar = mat.conj().T
    norm = max(float(np.linalg.norm(mat, 2)), 1.0)
    r = 1.0 / norm
    m = d + 1
    nodes = r * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.empty((m, m), dtype=complex)
    eye = np.eye(d)
    for a, u in enumerate(nodes):
        for b, v in enumerate(nodes):
            vals[a, b] = np.linalg.det(eye + (u / 2.0) * Astar + (v / 2.0) * mat)
    # nodes use the +2*pi*i kernel, so coefficient extraction is a forward FFT
    raw = np.fft.fft2(vals) / (m * m)
    # slots beyond total degree d are exactly zero for a homogeneous form;
    # check them before the radius rescaling amplifies their noise
    jj, kk = np.indices((m, m))
    spill_mask = jj + kk > d
    spill = float(np.max(np.abs(raw[spill_mask]))) if np.any(spill_mask) else 0.0
    scale_raw = max(float(np.max(np.abs(raw))), 1e-300)
    if spill > 1e-9 * scale_raw:
        raise ConditioningError(
            f"characteristic-form interpolation left degree spill {spill / scale_raw:.2e}"
        )
    coef = raw / (r ** (jj + kk))
    table = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            if j + k <= d:
                table[d - j - k, j] = coef[j, k]
    f = HomPoly(d, table)
    return f.real_part()


# ---------------------------------------------------------------------------
# eigenvalue sweeps
# ---------------------------------------------------------------------------


@dataclass
class RangeSample:
    """Support values, eigenvalue branches, and boundary points on a theta grid."""

    thetas: np.ndarray
    support: np.ndarray          # top eigenvalue h(theta)
    branches: np.ndarray         # (N, d), descending per row
    boundary: np.ndarray         # complex z(theta) = v* A v for the top eigenvector
    crossings: np.ndarray        # bool: top gap below crossing tolerance

    @property
    def grid_size(self) -> int:
        return len(self.thetas)

    def to_csv(self) -> str:
        d = self.branches.shape[1]
        out = io.StringIO()
        cols = ["theta", "h"] + [f"lambda_{k + 1}" for k in range(d)] + ["re_z", "im_z"]
        out.write(",".join(cols) + "\n")
        for i in range(self.grid_size):
            row = [repr(float(self.thetas[i])), repr(float(self.support[i]))]
            row += [repr(float(v)) for v in self.branches[i]]
            row += [repr(float(self.boundary[i].real)), repr(float(self.boundary[i].imag))]
            out.write(",".join(row) + "\n")
        return out.getvalue()


def support_sweep(A, N: int = 720, crossing_tol: float = 1e-8) -> RangeSample:
    """Hermitian eigen-decomposition of Re(e^{-i theta} A) over a uniform
    theta grid of size N (expected N >= 4d for sane resolution)."""
    mat = _as_matrix(A)
    d = mat.shape[0]
    if N < 1:
        raise ValidationError("grid size must be positive")
    thetas = 2.0 * np.pi * np.arange(N) / N
    branches = np.empty((N, d))
    boundary = np.empty(N, dtype=complex)
    for i, th in enumerate(thetas):
        H = (np.exp(-1j * th) * mat + np.exp(1j * th) * mat.conj().T) / 2.0
        w, V = np.linalg.eigh(H)
        branches[i] = w[::-1]
        top = V[:, -1]
        boundary[i] = complex(top.conj() @ mat @ top)
    support = branches[:, 0].copy()
    if d > 1:
        gaps = branches[:, 0] - branches[:, 1]
        crossings = gaps <= crossing_tol * (1.0 + np.abs(branches[:, 0]))
    else:
        crossings = np.zeros(N, dtype=bool)
    return RangeSample(thetas, support, branches, boundary, crossings)


@dataclass
class KippenhahnSamples:
    """Real points on the curve F_A = 0 and the dual boundary-generating data.

    points[i, j] = (-lambda_j(theta_i), cos theta_i, sin theta_i) lies on the
    curve for every branch j; duals[i, j] is the eigenvector quadratic form
    tracing the boundary generating curve.
    """

    thetas: np.ndarray
    points: np.ndarray   # (N, d, 3) real
    duals: np.ndarray    # (N, d) complex

    def flat_points(self) -> np.ndarray:
        return self.points.reshape(-1, 3)


def kippenhahn_samples(A, N: int = 720) -> KippenhahnSamples:
    """Sample all real branches of the curve attached to A along the theta
    grid, together with the dual points z_j(theta)."""
    mat = _as_matrix(A)
    d = mat.shape[0]
    thetas = 2.0 * np.pi * np.arange(N) / N
    points = np.empty((N, d, 3))
    duals = np.empty((N, d), dtype=complex)
    for i, th in enumerate(thetas):
        c, s = np.cos(th), np.sin(th)
        H = (np.exp(-1j * th) * mat + np.exp(1j * th) * mat.conj().T) / 2.0
        w, V = np.linalg.eigh(H)
        w = w[::-1]
        V = V[:, ::-1]
        for j in range(d):
            points[i, j] = (-w[j], c, s)
            vec = V[:, j]
            duals[i, j] = complex(vec.conj() @ mat @ vec)
    return KippenhahnSamples(thetas, points, duals)


def detect_symmetry(sample: RangeSample, d: int, tol: float | None = None):
    """Largest rotation order m <= d under which the support function is
    invariant (checked by exact grid shifts, so only m dividing the grid size
    are candidates), plus a conjugation-invariance flag from h(-theta)."""
    h = sample.support
    N = len(h)
    if tol is None:
        tol = 1e-6 * (1.0 + float(np.max(h)))
    order = 1
    for m in range(min(d, N), 1, -1):
        if N % m != 0:
            continue
        shift = N // m
        if float(np.max(np.abs(np.roll(h, -shift) - h))) <= tol:
            order = m
            break
    reflected = h[(-np.arange(N)) % N]
    conj_invariant = bool(float(np.max(np.abs(reflected - h))) <= tol)
    return order, conj_invariant


# ---------------------------------------------------------------------------
# higher-rank ranges
# ---------------------------------------------------------------------------


@dataclass
class WkRange:
    """Support-style description of the rank-k numerical range: the
    intersection over the grid of half planes Re(e^{-i theta} z) <= levels."""

    k: int
    thetas: np.ndarray
    levels: np.ndarray
    empty: bool
    chebyshev_center: complex | None
    chebyshev_radius: float

    def support(self, angle: float) -> float:
        """max Re(e^{-i angle} z) over the described set, by linear program."""
        if self.empty:
            raise ValidationError("the set is empty")
        c = -np.array([np.cos(angle), np.sin(angle)])
        A_ub = np.column_stack([np.cos(self.thetas), np.sin(self.thetas)])
        res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=self.levels,
                                     bounds=[(None, None), (None, None)],
                                     method="highs")
        if not res.success:
            raise NumericalError(f"support LP failed: {res.message}")
        return float(-res.fun)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "empty": self.empty,
            "grid": len(self.thetas),
            "chebyshev_center": None if self.chebyshev_center is None else
                [self.chebyshev_center.real, self.chebyshev_center.imag],
            "chebyshev_radius": self.chebyshev_radius,
        }


def higher_rank_range(A, k: int, N: int = 720, empty_tol: float = 1e-10) -> WkRange:
    """Rank-k numerical range as half-plane data from the k-th eigenvalue
    sweep; emptiness decided by the Chebyshev-center linear program."""
    mat = _as_matrix(A)
    d = mat.shape[0]
    if not 1 <= k <= d:
        raise ValidationError(f"k must lie in 1..{d}")
    sweep = support_sweep(mat, N)
    levels = sweep.branches[:, k - 1].copy()
    thetas = sweep.thetas
    # maximize rho s.t. x cos + y sin + rho <= level
    A_ub = np.column_stack([np.cos(thetas), np.sin(thetas), np.ones(N)])
    res = scipy.optimize.linprog(np.array([0.0, 0.0, -1.0]), A_ub=A_ub, b_ub=levels,
                                 bounds=[(None, None), (None, None), (None, None)],
                                 method="highs")
    if not res.success:
        # infeasible LPs cannot happen here (rho can go to -inf), so treat
        # any solver failure as a numerical error
        raise NumericalError(f"Chebyshev LP failed: {res.message}")
    rho = float(res.x[2])
    empty = rho < -empty_tol
    center = None if empty else complex(res.x[0], res.x[1])
    return WkRange(k, thetas, levels, empty, center, max(rho, 0.0) if not empty else rho)


# ---------------------------------------------------------------------------
# synthesis of an invariant shift matrix from an invariant range
# ---------------------------------------------------------------------------


@dataclass
class SynthesisDiagnostics:
    rotation_order: int
    conj_invariant: bool
    path: str                      # "invariant" or "fitted"
    fitted_degree: int
    pad: int
    max_support_deviation: float
    construction: ConstructDiagnostics | None = None
    messages: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "rotation_order": self.rotation_order,
            "conj_invariant": self.conj_invariant,
            "path": self.path,
            "fitted_degree": self.fitted_degree,
            "pad": self.pad,
            "max_support_deviation": self.max_support_deviation,
            "construction": self.construction.to_json_dict() if self.construction else None,
            "messages": self.messages,
        }


def _real_invariant_basis(n: int, degree: int, dihedral: bool):
    """Real-valued basis of the invariant forms of the given degree: for each
    monomial pair (j, k), (k, j) the symmetric and (unless dihedral) the
    antisymmetric real combination."""
    basis = []
    for a in range(degree + 1):
        for j in range(degree - a + 1):
            k = degree - a - j
            if (j - k) % n != 0 or j < k:
                continue
            if j == k:
                basis.append(HomPoly.monomial(a, j, k))
            else:
                plus = HomPoly.from_terms(degree, [(a, j, k, 1.0), (a, k, j, 1.0)])
                basis.append(plus)
                if not dihedral:
                    minus = HomPoly.from_terms(degree, [(a, j, k, 1j), (a, k, j, -1j)])
                    basis.append(minus)
    return basis


def _fit_invariant_curve(points: np.ndarray, n: int, max_degree: int,
                         dihedral: bool, rank_tol: float = 1e-7):
    """Smallest-degree real invariant polynomial vanishing on the given real
    points, found by increasing-degree SVD nullspace search with a
    hyperbolicity verdict as the acceptance test."""
    for e in range(n, max_degree + 1):
        basis = _real_invariant_basis(n, e, dihedral)
        E = np.empty((len(points), len(basis)))
        for c, b in enumerate(basis):
            vals = b.eval_xyz(points[:, 0], points[:, 1], points[:, 2])
            E[:, c] = vals.real
        norms = np.linalg.norm(E, axis=1)
        norms[norms < 1e-300] = 1.0
        E = E / norms[:, None]
        _, sv, Vh = np.linalg.svd(E, full_matrices=False)
        smax = sv.max(initial=0.0)
        null_rows = [i for i in range(len(sv)) if sv[i] <= rank_tol * max(smax, 1e-300)]
        for i in sorted(null_rows, key=lambda i: sv[i]):
            vec = Vh[i]
            cand = HomPoly.zero(e)
            for c, b in enumerate(basis):
                cand = cand + b.scale(vec[c])
            lead = cand.lead()
            if abs(lead.real) <= 1e-8 * (1.0 + cand.max_abs()):
                continue
            cand = cand.scale(1.0 / lead.real)
            verdict = hyperbolicity_verdict(cand)
            if verdict.is_hyperbolic:
                return cand, e
    return None, 0


def synthesize_invariant_cws(
    B,
    n: int | None = None,
    N: int = 720,
    seed: int = 0,
    perturb_schedule=None,
    rank_tol: float = 1e-7,
    eig_tol: float = 1e-8,
) -> tuple[BlockCWS, SynthesisDiagnostics]:
    """Produce a block cyclic weighted shift matrix with the same numerical
    range as B, assuming that range is invariant under rotation by 2 pi / n.

    When F_B itself is invariant it is used directly; otherwise the minimal
    invariant curve through the extreme boundary data is fitted and padded
    by a power of t up to the next multiple of n before construction.
    """
    mat = _as_matrix(B)
    d = mat.shape[0]
    sweep_b = support_sweep(mat, N)
    detected, conj_invariant = detect_symmetry(sweep_b, d)
    if n is None:
        n = detected
    if n < 2:
        raise ValidationError(
            "no rotation symmetry of order >= 2 detected; pass the order explicitly"
        )
    messages = []
    FB = char_poly(mat)
    rep = invariance_report(FB, n)
    if rep.is_cn_invariant and rep.is_real_valued:
        fit = FB.scale(1.0 / rep.lead.real)
        e = d
        path = "invariant"
        dihedral = conj_invariant and rep.is_dihedral_invariant
    else:
        kip = kippenhahn_samples(mat, N)
        keep = []
        for i in range(N):
            h = sweep_b.support[i]
            for j in range(d):
                lam = -kip.points[i, j, 0]
                if lam >= h - eig_tol * (1.0 + abs(h)):
                    keep.append(kip.points[i, j])
        pts = np.array(keep)
        # close under the rotation action for robustness off-grid
        closed = [pts]
        for m in range(1, n):
            alpha = 2.0 * np.pi * m / n
            ca, sa = np.cos(alpha), np.sin(alpha)
            rot = pts.copy()
            rot[:, 1] = ca * pts[:, 1] + sa * pts[:, 2]
            rot[:, 2] = -sa * pts[:, 1] + ca * pts[:, 2]
            closed.append(rot)
        pts = np.vstack(closed)
        fit, e = _fit_invariant_curve(pts, n, d, conj_invariant, rank_tol)
        if fit is None:
            raise NumericalError(
                "no hyperbolic invariant polynomial of degree <= d fits the "
                "extreme boundary data"
            )
        path = "fitted"
        fit_rep = invariance_report(fit, n)
        dihedral = conj_invariant and fit_rep.is_dihedral_invariant
        messages.append(f"fitted invariant factor of degree {e}")

    target_degree = n * int(np.ceil(e / n))
    pad = target_degree - e
    padded = HomPoly.t_power(pad) * fit if pad else fit
    A, cons = construct_cws(padded, n, dihedral=dihedral,
                            perturb_schedule=perturb_schedule, seed=seed)
    sweep_a = support_sweep(A.matrix, N)
    dev = float(np.max(np.abs(sweep_a.support - sweep_b.support)))
    diag = SynthesisDiagnostics(
        rotation_order=n,
        conj_invariant=conj_invariant,
        path=path,
        fitted_degree=e,
        pad=pad,
        max_support_deviation=dev,
        construction=cons,
        messages=messages,
    )
    return A, diag


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------


def curve_samples(f: HomPoly, N: int = 720, tol: float = 1e-7):
    """Real points on the projective curve f = 0 swept by direction, with
    affine dual points from the gradient where the tangent is visible.

    Returns (points, duals): points is (m, 3) rows (t, cos, sin) with
    f(point) ~ 0; duals is (m, 2) rows of the dual curve's affine part, NaN
    where the t-gradient vanishes.
    """
    ft, fx, fy = f.dt(), f.dx(), f.dy()
    pts = []
    duals = []
    for i in range(N):
        th = 2.0 * np.pi * i / N
        c, s = np.cos(th), np.sin(th)
        roots = np.roots(f.restrict_coeffs(c, s).real[::-1])
        for lam in roots:
            if abs(lam.imag) > tol * (1.0 + abs(lam)):
                continue
            p = (lam.real, c, s)
            pts.append(p)
            gt = ft.eval_xyz(*p)
            if abs(gt) > 1e-9 * (1.0 + ft.max_abs()):
                duals.append((
                    float((fx.eval_xyz(*p) / gt).real),
                    float((fy.eval_xyz(*p) / gt).real),
                ))
            else:
                duals.append((float("nan"), float("nan")))
    return np.array(pts), np.array(duals)
