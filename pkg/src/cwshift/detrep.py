"""Block cyclic weighted shift determinantal representations.

Given an invariant hyperbolic f of degree d = q*n and an invariant
interlacer g, the pipeline here reverse-engineers a matrix A with
f = det(t*I + (u/2) A^* + (v/2) A) whose zero pattern certifies the
invariance: A[i,j] = 0 unless j - i == 1 (mod n).

The route goes through a d x d matrix G of degree-(d-1) forms whose first
row vanishes on half of the intersection points of f and g (one orbit
family S out of each conjugate pair), has interior entries solved from the
two-generator membership h = a*f + b*g inside rotation eigenspaces, and
whose adjugate, divided by f^(d-2), collapses to a linear matrix pencil.
Block Cholesky normalization of the t-coefficient then turns the pencil
into the shift-patterned matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    AssumptionError,
    ConstructionFailedError,
    DefinitenessError,
    NumericalError,
    RankDeficiencyError,
    ValidationError,
)
from .hyperbolicity import default_interlacer, hyperbolicity_verdict, nuij_step
from .intersect import (
    POINT_TOL,
    AssumptionReport,
    OrbitSplit,
    ProjPoint,
    check_assumptions,
    intersect_curves,
    orbit_split,
)
from .polyring import (
    GroupElement,
    HomPoly,
    act_group,
    eigenspace_monomials,
    eigenspace_project,
    invariance_report,
    rel_inf_diff,
)

__all__ = [
    "BlockCWS",
    "LinearPencil",
    "GramMatrix",
    "ConstructDiagnostics",
    "CWSValidation",
    "vanishing_subspace",
    "noether_solve",
    "assemble_gram",
    "pencil_from_adjugate",
    "normalize_pencil",
    "construct_cws",
    "validate_cws",
    "random_block_cws",
    "cws_to_dict",
    "cws_from_dict",
]

DEFAULT_PERTURB_SCHEDULE = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


# ---------------------------------------------------------------------------
# matrix-shaped value types
# ---------------------------------------------------------------------------


def _shift_pattern_mask(n: int, d: int) -> np.ndarray:
    i, j = np.indices((d, d))
    return (j - i) % n == 1 % n


@dataclass
class BlockCWS:
    """Square matrix whose (i, j) entry vanishes unless j - i == 1 (mod n).

    Stored entries satisfy the pattern exactly; construction zeroes
    sub-tolerance dust and refuses anything larger.
    """

    n: int
    d: int
    matrix: np.ndarray
    real: bool = False

    @classmethod
    def from_matrix(cls, matrix, n: int, tol: float = 1e-8, real: bool | None = None) -> "BlockCWS":
        A = np.array(matrix, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError("matrix must be square")
        d = A.shape[0]
        scale = max(float(np.max(np.abs(A))), 1e-300)
        mask = _shift_pattern_mask(n, d)
        off = float(np.max(np.abs(A[~mask]))) if np.any(~mask) else 0.0
        if off > tol * scale:
            raise ValidationError(
                f"matrix violates the order-{n} shift pattern (off-pattern magnitude {off:.2e})"
            )
        A = np.where(mask, A, 0.0)
        max_imag = float(np.max(np.abs(A.imag)))
        if real is None:
            real = max_imag <= tol * scale
        if real:
            if max_imag > tol * scale:
                raise ValidationError("matrix declared real but has complex entries")
            A = A.real.astype(complex)
        return cls(n, d, A, real)

    def to_json_dict(self) -> dict:
        return cws_to_dict(self)


def cws_to_dict(A: BlockCWS) -> dict:
    entries = [[z.real, z.imag] for z in A.matrix.ravel()]
    return {"n": A.n, "d": A.d, "real": A.real, "entries": entries}


def cws_from_dict(data: dict) -> BlockCWS:
    try:
        n = int(data["n"])
        d = int(data["d"])
        real = bool(data.get("real", False))
        entries = np.array([complex(re, im) for re, im in data["entries"]], dtype=complex)
        matrix = entries.reshape(d, d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix dictionary: {exc}") from exc
    return BlockCWS.from_matrix(matrix, n, real=real)


@dataclass
class LinearPencil:
    """Linear matrix t*Ct + u*Cu + v*Cv; real-valued pencils have Ct
    Hermitian and Cv = Cu^*."""

    Ct: np.ndarray
    Cu: np.ndarray
    Cv: np.ndarray
    real: bool = False
    fit_residual: float = 0.0

    @property
    def size(self) -> int:
        return self.Ct.shape[0]

    def eval(self, t, u, v) -> np.ndarray:
        return t * self.Ct + u * self.Cu + v * self.Cv

    def entry_poly(self, i: int, j: int) -> HomPoly:
        return HomPoly.from_terms(1, [
            (1, 0, 0, self.Ct[i, j]),
            (0, 1, 0, self.Cu[i, j]),
            (0, 0, 1, self.Cv[i, j]),
        ])

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.Ct)), np.max(np.abs(self.Cu)),
                         np.max(np.abs(self.Cv))))


@dataclass
class GramMatrix:
    """d x d matrix of degree-(d-1) forms with g[j][i] == conj(g[i][j]) and
    entry (i, j) in the rotation eigenspace of residue i - j (mod n)."""

    entries: list[list[HomPoly]]
    n: int
    q: int
    real: bool = False

    @property
    def size(self) -> int:
        return len(self.entries)

    def eval(self, t, x, y) -> np.ndarray:
        d = self.size
        out = np.empty((d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                out[i, j] = self.entries[i][j].eval_xyz(t, x, y)
        return out

    def eigenspace_residual(self) -> float:
        """Largest relative deviation of an entry from its prescribed
        rotation eigenspace."""
        worst = 0.0
        for i in range(self.size):
            for j in range(self.size):
                p = self.entries[i][j]
                scale = max(p.max_abs(), 1e-300)
                proj = eigenspace_project(p, i - j, self.n)
                worst = max(worst, (p - proj).max_abs() / scale)
        return worst


# ---------------------------------------------------------------------------
# vanishing subspaces and the two-generator solve
# ---------------------------------------------------------------------------


def _monomial_matrix(points: list[ProjPoint], monos) -> np.ndarray:
    out = np.empty((len(points), len(monos)), dtype=complex)
    for r, p in enumerate(points):
        t, u, v = p.t, p.u, p.v
        for c, (a, j, k) in enumerate(monos):
            out[r, c] = (t ** a) * (u ** j) * (v ** k)
    return out


def _poly_from_vector(vec: np.ndarray, monos, degree: int) -> HomPoly:
    return HomPoly.from_terms(degree, [
        (a, j, k, vec[i]) for i, (a, j, k) in enumerate(monos)
    ])


def _vector_from_poly(p: HomPoly, monos) -> np.ndarray:
    return np.array([p.coeff(a, j, k) for a, j, k in monos], dtype=complex)


def vanishing_subspace(
    reps: list[ProjPoint],
    ell: int,
    n: int,
    degree: int,
    real_basis: bool = False,
    rank_tol: float = 1e-7,
    min_dim: int | None = None,
) -> list[HomPoly]:
    """Basis of the degree-`degree` forms in the residue-ell rotation
    eigenspace vanishing at the given orbit representatives.

    For even n and even ell every eigenspace monomial carries a factor of t,
    so representatives on the line t = 0 impose no condition and are dropped.
    With real_basis the returned polynomials have real coefficients in the
    (t, u, v) basis, which requires the S-side point set to be stable under
    reflection-conjugation.  Basis vectors are ordered most-null first.
    """
    monos = eigenspace_monomials(n, degree, ell % n)
    if not monos:
        return []
    pts = [p for p in reps
           if not (p.at_infinity and n % 2 == 0 and ell % 2 == 0)]
    M = len(monos)
    if pts:
        E = _monomial_matrix(pts, monos)
        norms = np.linalg.norm(E, axis=1)
        norms[norms < 1e-300] = 1.0
        E = E / norms[:, None]
        _, sv, Vh = np.linalg.svd(E, full_matrices=True)
        smax = sv.max(initial=0.0)
        rank = int(np.sum(sv > rank_tol * max(smax, 1e-300)))
        null = Vh[rank:][::-1].conj()  # rows: most-null first
    else:
        E = np.zeros((0, M), dtype=complex)
        null = np.eye(M, dtype=complex)
    dim = null.shape[0]
    if min_dim is not None and dim < min_dim:
        raise RankDeficiencyError(
            f"vanishing subspace of residue {ell} has dimension {dim} < {min_dim}"
        )
    if real_basis and dim > 0:
        stacked = np.hstack([null.T.real, null.T.imag])
        _, R, piv = scipy.linalg.qr(stacked, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        r_real = int(np.sum(diag > max(diag.max(initial=0.0), 1e-300) * 1e-10))
        if r_real < dim:
            raise RankDeficiencyError(
                "vanishing subspace is not conjugation-stable; "
                "was the split built in dihedral mode?"
            )
        cols = stacked[:, piv[:dim]]
        Q, _ = np.linalg.qr(cols)
        if pts.__len__():
            resid = np.max(np.abs(E @ Q)) if Q.size else 0.0
            if resid > 1e-6:
                raise RankDeficiencyError(
                    f"real basis left the vanishing subspace (residual {resid:.2e})"
                )
        null = Q.T.astype(complex)
    return [_poly_from_vector(null[i], monos, degree) for i in range(null.shape[0])]


def noether_solve(
    f: HomPoly,
    g: HomPoly,
    h: HomPoly,
    ell: int,
    n: int,
    rtol: float = 1e-7,
) -> tuple[HomPoly, HomPoly, float]:
    """Minimal-norm solution of h = a*f + b*g with a, b constrained to the
    residue-ell rotation eigenspaces of the appropriate degrees.

    f and g must be invariant; h must lie in the residue-ell eigenspace.
    Raises NumericalError when the least-squares residual exceeds rtol,
    which signals that the membership hypotheses fail numerically.
    """
    if h.degree < max(f.degree, g.degree):
        raise ValidationError("deg h must be at least deg f and deg g")
    scale_h = max(h.max_abs(), 1e-300)
    if (h - eigenspace_project(h, ell, n)).max_abs() > 1e-8 * scale_h:
        raise ValidationError("h is not in the prescribed rotation eigenspace")
    for p, name in ((f, "f"), (g, "g")):
        if p.rotation_defect(n) > 1e-8 * (1.0 + p.max_abs()):
            raise ValidationError(f"{name} is not rotation-invariant")
    # kill sub-tolerance dust so products stay exactly in-pattern
    f = eigenspace_project(f, 0, n)
    g = eigenspace_project(g, 0, n)
    h = eigenspace_project(h, ell, n)
    da = h.degree - f.degree
    db = h.degree - g.degree
    monos_a = eigenspace_monomials(n, da, ell % n)
    monos_b = eigenspace_monomials(n, db, ell % n)
    rows = eigenspace_monomials(n, h.degree, ell % n)
    row_index = {m: i for i, m in enumerate(rows)}

    def product_column(mono, base: HomPoly) -> np.ndarray:
        a0, j0, k0 = mono
        prod = HomPoly.monomial(a0, j0, k0) * base
        col = np.zeros(len(rows), dtype=complex)
        for a, j, k, c in prod.terms():
            col[row_index[(a, j, k)]] = c
        return col

    cols = [product_column(m, f) for m in monos_a] + \
           [product_column(m, g) for m in monos_b]
    A = np.column_stack(cols) if cols else np.zeros((len(rows), 0), dtype=complex)
    rhs = np.zeros(len(rows), dtype=complex)
    for a, j, k, c in h.terms():
        rhs[row_index[(a, j, k)]] = c

    all_real = max(f.imag_coeff_max(), g.imag_coeff_max(), h.imag_coeff_max()) \
        <= 1e-12 * (1.0 + max(f.max_abs(), g.max_abs(), h.max_abs()))
    if all_real:
        sol, *_ = np.linalg.lstsq(A.real, rhs.real, rcond=None)
        sol = sol.astype(complex)
    else:
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    residual = float(np.linalg.norm(A @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300))
    if residual > rtol:
        raise NumericalError(
            f"two-generator membership failed: relative residual {residual:.2e}"
        )
    a_poly = _poly_from_vector(sol[:len(monos_a)], monos_a, da)
    b_poly = _poly_from_vector(sol[len(monos_a):], monos_b, db)
    return a_poly, b_poly, residual


# ---------------------------------------------------------------------------
# Gram matrix assembly
# ---------------------------------------------------------------------------


def _random_unitary(q: int, rng: np.random.Generator, real: bool) -> np.ndarray:
    raw = rng.standard_normal((q, q))
    if not real:
        raw = raw + 1j * rng.standard_normal((q, q))
    Q, R = np.linalg.qr(raw)
    return Q * np.sign(np.diag(R))


def assemble_gram(
    f: HomPoly,
    g: HomPoly,
    split: OrbitSplit,
    n: int,
    real_mode: bool = False,
    rank_tol: float = 1e-7,
    noether_rtol: float = 1e-7,
    mix: int | None = None,
) -> GramMatrix:
    """Build the d x d matrix of degree-(d-1) forms underlying the
    representation: first row from vanishing subspaces at the S-side orbit
    representatives (with g itself in slot (1,1)), interior entries from the
    two-generator solve, Hermitian structure by conjugate-swapping.

    mix, when given, seeds a unitary remix of the first-row selections inside
    their nullspaces; retries after a definiteness failure use it.
    """
    d = f.degree
    if d % n != 0:
        raise ValidationError("degree must be a multiple of the rotation order")
    q = d // n
    reps = split.representatives
    rng = np.random.default_rng(mix) if mix is not None else None

    first_row: list[HomPoly | None] = [None] * d
    for r in range(n):
        ell = (-r) % n
        basis = vanishing_subspace(reps, ell, n, d - 1,
                                   real_basis=real_mode, rank_tol=rank_tol,
                                   min_dim=q)
        monos = eigenspace_monomials(n, d - 1, ell)
        V = np.column_stack([_vector_from_poly(p, monos) for p in basis])
        if r == 0:
            gvec = _vector_from_poly(g, monos)
            coords, *_ = np.linalg.lstsq(V, gvec, rcond=None)
            resid = np.linalg.norm(V @ coords - gvec) / max(np.linalg.norm(gvec), 1e-300)
            if resid > 1e-6:
                raise AssumptionError(
                    f"interlacer does not vanish on the S-side points (residual {resid:.2e})"
                )
            ghat = gvec / np.linalg.norm(gvec)
            comp = V - np.outer(ghat, ghat.conj() @ V)
            if q > 1:
                _, R, piv = scipy.linalg.qr(comp, mode="economic", pivoting=True)
                sel = comp[:, piv[:q - 1]]
                if rng is not None:
                    sel = sel @ _random_unitary(q - 1, rng, real_mode)
                Q, _ = np.linalg.qr(sel)
                extras = [Q[:, m] for m in range(q - 1)]
            else:
                extras = []
            vectors = [gvec] + extras
        else:
            sel = V[:, :q]
            if rng is not None:
                sel = sel @ _random_unitary(q, rng, real_mode)
            vectors = [sel[:, m] for m in range(q)]
        for m, vec in enumerate(vectors):
            col = r + m * n
            if real_mode:
                vec = vec.real.astype(complex)
            poly = _poly_from_vector(np.asarray(vec), monos, d - 1)
            first_row[col] = g if (r == 0 and m == 0) else poly

    entries: list[list[HomPoly | None]] = [[None] * d for _ in range(d)]
    entries[0] = list(first_row)
    for j in range(1, d):
        entries[j][0] = first_row[j].conjugate()

    for i in range(1, d):
        for j in range(i, d):
            h = entries[0][i].conjugate() * entries[0][j]
            _, b, _ = noether_solve(f, g, h, i - j, n, rtol=noether_rtol)
            if i == j:
                b = (b + b.conjugate()).scale(0.5)
            if real_mode:
                dust = b.imag_coeff_max()
                if dust > 1e-6 * (1.0 + b.max_abs()):
                    raise NumericalError(
                        f"interior entry ({i},{j}) failed to come out real (dust {dust:.2e})"
                    )
                b = b.with_real_coeffs()
            entries[i][j] = b
            if j > i:
                entries[j][i] = b.conjugate()

    return GramMatrix([list(row) for row in entries], n=n, q=q, real=real_mode)


# ---------------------------------------------------------------------------
# adjugate collapse and normalization
# ---------------------------------------------------------------------------


def pencil_from_adjugate(
    G: GramMatrix,
    f: HomPoly,
    num_samples: int = 16,
    seed: int = 0,
    fit_tol: float = 1e-6,
    pattern_tol: float = 1e-8,
) -> LinearPencil:
    """Fit the linear pencil adj(G) / f^(d-2) from point evaluations.

    Samples real points away from the curve f = 0, forms the numeric
    adjugate, divides, and least-squares-fits the three coefficient
    matrices; raises when the fit residual or the off-pattern mass exceeds
    tolerance (either failure means the adjugate did not collapse).
    """
    d = G.size
    if d < 2:
        raise ValidationError("pencil extraction needs d >= 2")
    rng = np.random.default_rng(seed)
    scale_f = max(f.max_abs(), 1e-300)
    samples = []
    guard = 0
    while len(samples) < num_samples:
        guard += 1
        if guard > 100 * num_samples:
            raise NumericalError("could not sample points away from the curve")
        p = rng.standard_normal(3)
        p /= np.linalg.norm(p)
        if abs(f.eval_xyz(*p)) >= 1e-6 * scale_f:
            samples.append(p)

    design = np.empty((num_samples, 3), dtype=complex)
    rhs = np.empty((num_samples, d * d), dtype=complex)
    for r, (t, x, y) in enumerate(samples):
        Gp = G.eval(t, x, y)
        det = np.linalg.det(Gp)
        adj = det * np.linalg.inv(Gp)
        Mp = adj / (f.eval_xyz(t, x, y) ** (d - 2))
        design[r] = (t, x + 1j * y, x - 1j * y)
        rhs[r] = Mp.ravel()

    coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    fit_residual = float(
        np.linalg.norm(design @ coef - rhs) / max(np.linalg.norm(rhs), 1e-300)
    )
    if fit_residual > fit_tol:
        raise NumericalError(
            f"adjugate did not collapse to a linear pencil (fit residual {fit_residual:.2e})"
        )
    Ct = coef[0].reshape(d, d)
    Cu = coef[1].reshape(d, d)
    Cv = coef[2].reshape(d, d)
    # Hermitian structure of a real-valued pencil
    Ct = (Ct + Ct.conj().T) / 2.0
    Cu = (Cu + Cv.conj().T) / 2.0
    Cv = Cu.conj().T

    scale = max(np.max(np.abs(Ct)), np.max(np.abs(Cu)), np.max(np.abs(Cv)), 1e-300)
    i_idx, j_idx = np.indices((d, d))
    diff = (i_idx - j_idx) % G.n
    off = 0.0
    for C, residue in ((Ct, 0), (Cu, 1 % G.n), (Cv, (-1) % G.n)):
        bad = diff != residue
        if np.any(bad):
            off = max(off, float(np.max(np.abs(C[bad]))))
    if off > pattern_tol * scale:
        raise NumericalError(
            f"pencil violates the eigenspace zero pattern (off-pattern {off / scale:.2e} relative)"
        )
    Ct = np.where(diff == 0, Ct, 0.0)
    Cu = np.where(diff == 1 % G.n, Cu, 0.0)
    Cv = np.where(diff == (-1) % G.n, Cv, 0.0)

    real = G.real
    if real:
        dust = max(np.max(np.abs(Ct.imag)), np.max(np.abs(Cu.imag)), np.max(np.abs(Cv.imag)))
        if dust > 1e-6 * scale:
            raise NumericalError(f"real pencil came out complex (dust {dust / scale:.2e})")
        Ct, Cu, Cv = Ct.real.astype(complex), Cu.real.astype(complex), Cv.real.astype(complex)
    return LinearPencil(Ct, Cu, Cv, real=real, fit_residual=fit_residual)


def normalize_pencil(M: LinearPencil, n: int, q: int) -> BlockCWS:
    """Block-diagonalize the t-coefficient by the residue-grouping
    permutation, normalize each diagonal block to the identity by Cholesky
    congruence, un-permute, and read the shift matrix off the v-coefficient.

    Raises DefinitenessError when a diagonal block is not positive definite
    (callers retry with a different nullspace selection)."""
    d = n * q
    if M.size != d:
        raise ValidationError(f"pencil size {M.size} does not match n*q = {d}")
    idx = np.arange(d)
    perm = np.empty(d, dtype=int)
    for i0 in range(d):
        a, b = divmod(i0, n)
        perm[i0] = b * q + a
    inv = np.empty(d, dtype=int)
    inv[perm] = idx

    def permute(C):
        return C[np.ix_(inv, inv)]

    def unpermute(C):
        return C[np.ix_(perm, perm)]

    Dt = permute(M.Ct)
    herm_defect = float(np.max(np.abs(Dt - Dt.conj().T)))
    if herm_defect > 1e-8 * max(np.max(np.abs(Dt)), 1e-300):
        raise NumericalError("t-coefficient is not Hermitian")
    blocks = []
    for k in range(n):
        B = Dt[k * q:(k + 1) * q, k * q:(k + 1) * q]
        B = (B + B.conj().T) / 2.0
        if M.real:
            B = B.real
        try:
            L = np.linalg.cholesky(B)
        except np.linalg.LinAlgError as exc:
            raise DefinitenessError(
                f"diagonal block {k} of the permuted t-coefficient is not positive definite"
            ) from exc
        blocks.append(np.linalg.inv(L))
    W = scipy.linalg.block_diag(*blocks).astype(complex)

    def conjugate(C):
        return W @ permute(C) @ W.conj().T

    Nt = unpermute(conjugate(M.Ct))
    Nu = unpermute(conjugate(M.Cu))
    Nv = unpermute(conjugate(M.Cv))
    id_defect = float(np.max(np.abs(Nt - np.eye(d))))
    if id_defect > 1e-8:
        raise NumericalError(
            f"normalized t-coefficient deviates from the identity by {id_defect:.2e}"
        )
    A = 2.0 * Nv
    return BlockCWS.from_matrix(A, n, real=M.real if M.real else None)


# ---------------------------------------------------------------------------
# full construction
# ---------------------------------------------------------------------------


@dataclass
class ConstructDiagnostics:
    perturbation: float
    retries: int
    rel_err_vs_used: float
    rel_err_vs_input: float
    schedule_tried: list[float] = field(default_factory=list)
    assumptions: AssumptionReport | None = None
    messages: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "perturbation": self.perturbation,
            "retries": self.retries,
            "rel_err_vs_used": self.rel_err_vs_used,
            "rel_err_vs_input": self.rel_err_vs_input,
            "schedule_tried": self.schedule_tried,
            "assumptions": self.assumptions.to_json_dict() if self.assumptions else None,
            "messages": self.messages,
        }


def _strictified(f: HomPoly, s: float) -> HomPoly:
    out = f
    for _ in range(f.degree):
        out = nuij_step(out, s)
    return out.normalized()


def construct_cws(
    f: HomPoly,
    n: int,
    dihedral: bool = False,
    g: HomPoly | None = None,
    perturb_schedule=None,
    seed: int = 0,
    max_retries: int = 8,
    point_tol: float = POINT_TOL,
    rank_tol: float = 1e-7,
    quality_tol: float = 1e-6,
) -> tuple[BlockCWS, ConstructDiagnostics]:
    """Build A with F_A = f for an invariant hyperbolic f of degree q*n.

    Runs the genericity checks first; when they fail, walks the perturbation
    schedule, replacing f by its normalized d-fold smoothing at parameter s
    (smallest workable s preferred, so the output stays close to the input)
    and re-deriving the interlacer.  Definiteness failures retry with
    reseeded nullspace selections before moving to the next s.
    """
    d = f.degree
    if d == 0 or d % n != 0:
        raise ValidationError(
            f"degree {d} is not a positive multiple of n = {n}; pad the input "
            f"with t^{(n - d % n) % n} to reach one"
        )
    rep = invariance_report(f, n)
    if not rep.is_real_valued:
        raise ValidationError("input polynomial is not real-valued")
    if not rep.is_cn_invariant:
        raise ValidationError(f"input polynomial is not invariant under rotation of order {n}")
    if dihedral and not rep.is_dihedral_invariant:
        raise ValidationError("dihedral mode requires reflection symmetry")
    # project onto the exact symmetry pattern: kills interpolation dust so the
    # eigenspace bookkeeping downstream is exact
    f0 = eigenspace_project(f, 0, n).real_part()
    if dihedral:
        f0 = (f0 + act_group(f0, GroupElement.reflection(n))).scale(0.5)
    f0 = f0.scale(1.0 / rep.lead.real)
    if g is not None and g.degree != d - 1:
        raise ValidationError("supplied interlacer must have degree d - 1")

    verdict = hyperbolicity_verdict(f0)
    if not verdict.is_hyperbolic:
        raise ValidationError(f"input polynomial is {verdict.status}")

    if d == 1:
        A = BlockCWS.from_matrix(np.array([[2.0 * f0.coeff(0, 0, 1)]]), n,
                                 real=dihedral if dihedral else None)
        diag = ConstructDiagnostics(0.0, 0, 0.0, 0.0)
        return A, diag

    from .numrange import char_poly  # deferred: numrange builds on this module

    schedule = list(perturb_schedule) if perturb_schedule is not None \
        else list(DEFAULT_PERTURB_SCHEDULE)
    candidates = [0.0] + sorted(s for s in schedule if s > 0)
    q = d // n
    tried: list[float] = []
    messages: list[str] = []
    best_error: ConstructDiagnostics | None = None

    for s in candidates:
        tried.append(s)
        if s == 0.0:
            fs = f0
            gs = g if g is not None else default_interlacer(f0)
        else:
            fs = _strictified(f0, s)
            gs = default_interlacer(fs)
        report = check_assumptions(fs, gs, n, tol=point_tol)
        if not report.passed:
            messages.append(f"s={s:g}: assumptions failed "
                            f"(A1={report.a1} A2={report.a2} A3={report.a3} A4={report.a4})")
            continue
        try:
            points = intersect_curves(fs, gs, tol=point_tol)
            split = orbit_split(points, n, dihedral=dihedral, tol=max(point_tol * 10, 1e-8))
        except AssumptionError as exc:
            messages.append(f"s={s:g}: orbit split failed: {exc}")
            continue
        for attempt in range(max_retries + 1):
            mix = None if attempt == 0 else seed * 9973 + attempt
            try:
                G = assemble_gram(fs, gs, split, n, real_mode=dihedral,
                                  rank_tol=rank_tol, mix=mix)
                pencil = pencil_from_adjugate(G, fs, seed=seed)
                A = normalize_pencil(pencil, n, q)
                FA = char_poly(A.matrix)
                err_used = rel_inf_diff(FA, fs)
                err_orig = rel_inf_diff(FA, f0)
                if err_used > quality_tol:
                    raise NumericalError(
                        f"reconstruction error {err_used:.2e} above {quality_tol:g}"
                    )
                return A, ConstructDiagnostics(
                    perturbation=s,
                    retries=attempt,
                    rel_err_vs_used=err_used,
                    rel_err_vs_input=err_orig,
                    schedule_tried=tried,
                    assumptions=report,
                    messages=messages,
                )
            except AssumptionError as exc:
                messages.append(f"s={s:g} attempt {attempt}: {exc}")
                break
            except NumericalError as exc:
                messages.append(f"s={s:g} attempt {attempt}: {exc}")
                continue

    raise ConstructionFailedError(
        "construction failed for every perturbation in the schedule",
        diagnostics=ConstructDiagnostics(
            perturbation=float("nan"), retries=max_retries,
            rel_err_vs_used=float("nan"), rel_err_vs_input=float("nan"),
            schedule_tried=tried, messages=messages,
        ),
    )


# ---------------------------------------------------------------------------
# validation and sampling helpers
# ---------------------------------------------------------------------------


@dataclass
class CWSValidation:
    order: int
    size: int
    max_off_pattern: float
    scaling_residual: float
    max_imag: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_off_pattern <= self.tol and self.scaling_residual <= self.tol

    @property
    def is_real(self) -> bool:
        return self.max_imag <= self.tol

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "size": self.size,
            "max_off_pattern": self.max_off_pattern,
            "scaling_residual": self.scaling_residual,
            "max_imag": self.max_imag,
            "tol": self.tol,
            "ok": self.ok,
            "is_real": self.is_real,
        }


def validate_cws(A, n: int, tol: float = 1e-8) -> CWSValidation:
    """Report zero-pattern compliance, the identity conj(Omega) A Omega ==
    omega A for Omega = diag(1, omega, ..., omega^(d-1)), and realness.
    Residuals are relative to the matrix scale."""
    mat = A.matrix if isinstance(A, BlockCWS) else np.array(A, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError("matrix must be square")
    d = mat.shape[0]
    scale = max(float(np.max(np.abs(mat))), 1e-300)
    mask = _shift_pattern_mask(n, d)
    off = float(np.max(np.abs(mat[~mask]))) if np.any(~mask) else 0.0
    omega = np.exp(2j * np.pi / n)
    Omega = np.diag(omega ** np.arange(d))
    resid = float(np.linalg.norm(Omega.conj().T @ mat @ Omega - omega * mat))
    nf = max(float(np.linalg.norm(mat)), 1e-300)
    return CWSValidation(
        order=n,
        size=d,
        max_off_pattern=off / scale,
        scaling_residual=resid / nf,
        max_imag=float(np.max(np.abs(mat.imag))) / scale,
        tol=tol,
    )


def random_block_cws(n: int, d: int, seed=0, real: bool = False) -> BlockCWS:
    """Random matrix with the order-n shift pattern; complex entries uniform
    in the unit disc, or uniform in [-1, 1] when real."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mask = _shift_pattern_mask(n, d)
    A = np.zeros((d, d), dtype=complex)
    m = int(mask.sum())
    if real:
        vals = rng.uniform(-1.0, 1.0, size=m)
    else:
        radii = np.sqrt(rng.uniform(0.0, 1.0, size=m))
        angles = rng.uniform(0.0, 2.0 * np.pi, size=m)
        vals = radii * np.exp(1j * angles)
    A[mask] = vals
    return BlockCWS.from_matrix(A, n, real=real)
