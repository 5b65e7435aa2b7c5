"""Quaternionic projective 2-designs and equi-isoclinic fusion frames.

Quaternions are float64 arrays whose trailing axis holds the four real
components (1, i, j, k); vectors are (d, 4), matrices (m, n, 4), ensembles
(n, d, 4).  The quaternionic inner product x*y = sum conj(x_i) y_i is
conjugate-linear in the first slot, and d x d quaternion matrices form a
real Hilbert space under <A, B> = Re tr(A*B), which is literally the dot
product of the coordinate arrays.

The headline construction: for unit x in H^d, the real 3-space
S(x) = {x z x* : Re z = 0} has orthogonal basis (x i x*, x j x*, x k x*),
and an equiangular tight 2-design {x_k} turns {S(x_k)} into an
equi-isoclinic tight fusion frame of n = 2d^2 - d subspaces inside the
d(2d+1)-dimensional space of Hermitian quaternion matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

ALGEBRA_TOL = 1e-12
DEFAULT_TOL = 1e-9

Q_ONE = np.array([1.0, 0.0, 0.0, 0.0])
Q_I = np.array([0.0, 1.0, 0.0, 0.0])
Q_J = np.array([0.0, 0.0, 1.0, 0.0])
Q_K = np.array([0.0, 0.0, 0.0, 1.0])


class QDesignError(Exception):
    pass


class DimensionMismatch(QDesignError):
    pass


class ZeroVector(QDesignError):
    pass


# ---------------------------------------------------------------------------
# quaternion arithmetic on (..., 4) arrays
# ---------------------------------------------------------------------------


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out[..., 1:] *= -1.0
    return out


def qabs2(a: np.ndarray) -> np.ndarray:
    """Squared quaternion norm |q|^2, reducing the trailing axis."""
    a = np.asarray(a, dtype=np.float64)
    return np.sum(a * a, axis=-1)


def q_herm_inner(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x*y = sum_i conj(x_i) y_i for (d, 4) vectors; a single quaternion."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatch(f"{x.shape} vs {y.shape}")
    return qmul(qconj(x), y).sum(axis=-2)


def qmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion matrix product of (m, t, 4) and (t, n, 4)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    aw, ax, ay, az = (a[..., c] for c in range(4))
    bw, bx, by, bz = (b[..., c] for c in range(4))
    return np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )


def conj_transpose(a: np.ndarray) -> np.ndarray:
    return qconj(np.swapaxes(np.asarray(a, dtype=np.float64), 0, 1))


def outer(x: np.ndarray, y: Optional[np.ndarray] = None) -> np.ndarray:
    """Rank-one matrix x y* from (d, 4) vectors (y defaults to x)."""
    x = np.asarray(x, dtype=np.float64)
    y = x if y is None else np.asarray(y, dtype=np.float64)
    return qmul(x[:, None, :], qconj(y)[None, :, :])


def re_trace_inner(a: np.ndarray, b: np.ndarray) -> float:
    """<A, B> = Re tr(A*B) = vec(A) . vec(B) over the real coordinates."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


# ---------------------------------------------------------------------------
# the complex lift H -> C^{2x2}
# ---------------------------------------------------------------------------

_F1 = np.eye(2, dtype=np.complex128)
_FI = np.array([[1j, 0], [0, -1j]])
_FJ = np.array([[0, 1], [-1, 0]], dtype=np.complex128)
_FK = np.array([[0, 1j], [1j, 0]])


def complex_embed(q: np.ndarray) -> np.ndarray:
    """The algebra homomorphism a+bi+cj+dk -> [[a+bi, c+di], [-c+di, a-bi]].

    Multiplicative, additive, and trace-halving: tr f(q) = 2 Re q.
    """
    q = np.asarray(q, dtype=np.float64)
    return q[0] * _F1 + q[1] * _FI + q[2] * _FJ + q[3] * _FK


def complex_lift(a: np.ndarray) -> np.ndarray:
    """Blockwise lift of an (m, n, 4) quaternion matrix to C^{2m x 2n},
    so that Re tr M = (1/2) tr lift(M) and lifts multiply like the
    originals."""
    a = np.asarray(a, dtype=np.float64)
    return (
        np.kron(a[..., 0], _F1)
        + np.kron(a[..., 1], _FI)
        + np.kron(a[..., 2], _FJ)
        + np.kron(a[..., 3], _FK)
    )


# ---------------------------------------------------------------------------
# ensembles and moments
# ---------------------------------------------------------------------------


class QEnsemble:
    """Unit vectors in H^d, stored as an (n, d, 4) float array."""

    __slots__ = ("vectors",)

    def __init__(self, vectors, check: bool = True):
        v = np.asarray(vectors, dtype=np.float64)
        if v.ndim != 3 or v.shape[-1] != 4:
            raise ValueError("vectors must be an (n, d, 4) array")
        self.vectors = v
        if check and v.shape[0]:
            norms = np.sqrt(np.sum(v * v, axis=(1, 2)))
            if np.max(np.abs(norms - 1.0)) > 1e-8:
                raise ValueError("vectors must be unit norm")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def __repr__(self):
        return f"QEnsemble(n={self.n}, d={self.d})"


def overlap_matrix(ens: QEnsemble) -> np.ndarray:
    """(n, n) matrix of squared overlaps |x_k* x_l|^2 = <x_k x_k*, x_l x_l*>."""
    v = ens.vectors
    ips = qmul(qconj(v)[:, None, :, :], v[None, :, :, :]).sum(axis=2)
    return qabs2(ips)


def q_design_moments(ens: QEnsemble) -> Tuple[float, float]:
    """Double averages of <x_k x_k*, x_l x_l*> and of its square.

    A 2-design in H^d hits 1/d and 6/(2d(2d+1)); the first moment alone is
    already 1/d for every tight frame.
    """
    sq = overlap_matrix(ens)
    return float(sq.mean()), float((sq**2).mean())


def design_targets(d: int) -> Tuple[float, float]:
    return 1.0 / d, 6.0 / (2 * d * (2 * d + 1))


@dataclass
class QDesignCheck:
    ok: bool
    n: int
    d: int
    first: float
    second: float
    b: Optional[float] = None
    witness: Optional[Tuple[int, int]] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_tight_q_design(ens: QEnsemble, tol: float = DEFAULT_TOL) -> QDesignCheck:
    """Tight quaternionic 2-design test: moments on target, equiangular
    overlaps, and the tightness count n = 2d^2 - d."""
    n, d = ens.n, ens.d
    first, second = q_design_moments(ens)
    t1, t2 = design_targets(d)
    if abs(first - t1) > tol or abs(second - t2) > tol:
        return QDesignCheck(False, n, d, first, second, reason="moments off target")
    sq = overlap_matrix(ens)
    if n > 1:
        iu, ju = np.triu_indices(n, k=1)
        vals = sq[iu, ju]
        b = float(vals[0])
        worst = int(np.argmax(np.abs(vals - b)))
        if abs(vals[worst] - b) > tol:
            return QDesignCheck(
                False, n, d, first, second, b=b,
                witness=(int(iu[worst]), int(ju[worst])),
                reason="not equiangular",
            )
    else:
        b = None
    if n != 2 * d * d - d:
        return QDesignCheck(
            False, n, d, first, second, b=b, reason=f"n != {2 * d * d - d}"
        )
    return QDesignCheck(True, n, d, first, second, b=b)


# ---------------------------------------------------------------------------
# the S(x) subspaces and their cross-Gramians
# ---------------------------------------------------------------------------


@dataclass
class SubspaceBasis:
    """Orthogonal basis (x i x*, x j x*, x k x*) of S(x)."""

    source: np.ndarray
    elements: np.ndarray  # (3, d, d, 4), anti-Hermitian


def s_basis(x: np.ndarray) -> SubspaceBasis:
    x = np.asarray(x, dtype=np.float64)
    if float(np.sum(x * x)) == 0.0:
        raise ZeroVector("S(x) needs x != 0")
    elems = np.stack([outer(qmul(x, u), x) for u in (Q_I, Q_J, Q_K)])
    return SubspaceBasis(source=x, elements=elems)


def cross_gramian(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """3x3 real Gramian G[u, v] = <x u x*, y v y*> = Re(conj(u) q v conj(q))
    with q = x*y.  Equals |x*y|^2 times a rotation (or 0 when x*y = 0)."""
    q = q_herm_inner(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    units = (Q_I, Q_J, Q_K)
    out = np.empty((3, 3))
    for r, u in enumerate(units):
        left = qmul(qconj(u), q)
        for c, v in enumerate(units):
            out[r, c] = qmul(qmul(left, v), qconj(q))[0]
    return out


@dataclass
class FusionCertificate:
    """Equi-isoclinic tight fusion frame certificate for {S(x_k)}.

    alpha is the common isoclinicity constant (G* G = alpha I_3 across all
    pairs), potential the fusion frame potential (1/n^2) sum ||G_kl||_F^2,
    and target its tight value r^2 / dim = 9 / (d(2d+1))."""

    n: int
    d: int
    r: int
    ambient_dim: int
    isoclinic: bool
    alpha: Optional[float]
    potential: float
    target: float
    residuals: Dict[str, float] = field(default_factory=dict)
    witness: Optional[Tuple[int, int]] = None

    @property
    def tight(self) -> bool:
        return abs(self.potential - self.target) <= self.residuals.get("tol", DEFAULT_TOL)


def certify_fusion_frame(ens: QEnsemble, tol: float = DEFAULT_TOL) -> FusionCertificate:
    """Check the bridge from an equiangular ensemble to its S(x) subspaces.

    Every pair's cross-Gramian is computed; equi-isoclinicity means each
    GᵀG is a scalar alpha I_3 with one strictly positive alpha across all
    pairs (orthogonal subspaces — alpha = 0 — do not count as isoclinic).
    The fusion potential includes the diagonal (||G_kk||_F^2 = 3) and is
    compared to 9/(d(2d+1)), which it attains exactly when the source is a
    2-design.
    """
    n, d = ens.n, ens.d
    v = ens.vectors
    grams = np.empty((n, n, 3, 3))
    for k in range(n):
        for l in range(n):
            grams[k, l] = cross_gramian(v[k], v[l])
    potential = float(np.sum(grams**2) / (n * n))
    ambient = d * (2 * d + 1)
    target = 9.0 / ambient
    isoclinic = True
    alpha = None
    witness = None
    max_nonscalar = 0.0
    alpha_spread = 0.0
    for k in range(n):
        for l in range(k + 1, n):
            m = grams[k, l].T @ grams[k, l]
            a_kl = float(np.trace(m) / 3.0)
            dev = float(np.max(np.abs(m - a_kl * np.eye(3))))
            max_nonscalar = max(max_nonscalar, dev)
            if dev > tol and witness is None:
                isoclinic = False
                witness = (k, l)
            if a_kl <= tol and witness is None:
                isoclinic = False
                witness = (k, l)
            if alpha is None:
                alpha = a_kl
            else:
                alpha_spread = max(alpha_spread, abs(a_kl - alpha))
                if abs(a_kl - alpha) > tol and witness is None:
                    isoclinic = False
                    witness = (k, l)
    if not isoclinic:
        alpha = None
    return FusionCertificate(
        n=n,
        d=d,
        r=3,
        ambient_dim=ambient,
        isoclinic=isoclinic,
        alpha=alpha,
        potential=potential,
        target=target,
        residuals={
            "max_nonscalar": max_nonscalar,
            "alpha_spread": alpha_spread,
            "potential_gap": abs(potential - target),
            "tol": tol,
        },
        witness=witness,
    )


# ---------------------------------------------------------------------------
# the d = 2 simplex design
# ---------------------------------------------------------------------------


def _regular_simplex_r4() -> np.ndarray:
    """Five unit vectors in R^4 with pairwise dot -1/4, by factoring the
    simplex Gram matrix (deterministic: eigendecomposition order)."""
    g = 1.25 * np.eye(5) - 0.25 * np.ones((5, 5))
    w, v = np.linalg.eigh(g)
    coords = v[:, 1:] * np.sqrt(w[1:])
    return coords


def simplex_design_d2() -> QEnsemble:
    """Six unit vectors in H^2 forming a tight 2-design: e_1 together with
    (sqrt(2/5), sqrt(3/5) u_j) over a regular simplex of unit quaternions
    (pairwise Re(conj(u_a) u_b) = -1/4), realizing the 5-simplex picture."""
    us = _regular_simplex_r4()
    vecs = np.zeros((6, 2, 4))
    vecs[0, 0] = Q_ONE
    vecs[1:, 0, 0] = math.sqrt(2.0 / 5.0)
    vecs[1:, 1] = math.sqrt(3.0 / 5.0) * us
    return QEnsemble(vecs)


# ---------------------------------------------------------------------------
# frame-potential optimizer
# ---------------------------------------------------------------------------


def q_frame_potential(vectors: np.ndarray) -> float:
    """(1/n^2) sum_kl <x_k x_k*, x_l x_l*>^2 for an (n, d, 4) stack."""
    ips = qmul(qconj(vectors)[:, None, :, :], vectors[None, :, :, :]).sum(axis=2)
    sq = qabs2(ips)
    n = vectors.shape[0]
    return float(np.sum(sq * sq) / (n * n))


def q_potential_gradient(vectors: np.ndarray) -> np.ndarray:
    """Euclidean gradient of q_frame_potential in the real coordinates:
    grad_m = (8/n^2) sum_l |x_m* x_l|^2 . x_l (x_l* x_m)."""
    n = vectors.shape[0]
    ips = qmul(qconj(vectors)[:, None, :, :], vectors[None, :, :, :]).sum(axis=2)
    sq = qabs2(ips)  # (n, n)
    # q_lm = x_l* x_m = ips[l, m]; weight by sq[m, l] = sq[l, m]
    scaled = sq[:, :, None, None] * qmul(
        vectors[None, :, :, :], ips.transpose(1, 0, 2)[:, :, None, :]
    )  # entry [m, l] = sq[m, l] * x_l (x_l* x_m)
    return (8.0 / (n * n)) * scaled.sum(axis=1)


def _renormalize(vectors: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(vectors * vectors, axis=(1, 2), keepdims=True))
    return vectors / norms


@dataclass
class OptimizeResult:
    ensemble: QEnsemble
    potential: float
    bound: float
    gap: float
    converged: bool
    trace: List[float] = field(default_factory=list)
    iterations: int = 0
    seed: int = 0


def optimize_design(
    d: int,
    n: int,
    seed: int = 0,
    iters: int = 2000,
    gap_tol: float = 1e-14,
) -> OptimizeResult:
    """Projected gradient descent on the product of unit spheres in H^d.

    Minimizes the second-moment potential toward its 2-design bound
    6/(2d(2d+1)).  Steps use a Barzilai–Borwein guess with Armijo
    backtracking (halving, constant 1e-4) and renormalization as the
    retraction; the recorded trace is monotone.  Failure to reach the
    bound is reported through `converged`/`gap`, never raised.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    x = _renormalize(rng.standard_normal((n, d, 4)))
    bound = design_targets(d)[1]
    f = q_frame_potential(x)
    trace = [f]
    step = 1.0
    prev_x = None
    prev_g = None
    it = 0
    for it in range(1, iters + 1):
        g = q_potential_gradient(x)
        # tangent component on each sphere
        rad = np.sum(g * x, axis=(1, 2), keepdims=True)
        r = g - rad * x
        rnorm2 = float(np.sum(r * r))
        if rnorm2 < 1e-30 or f - bound <= gap_tol:
            break
        if prev_x is not None:
            s = (x - prev_x).ravel()
            dg = (g - prev_g).ravel()
            denom = float(s @ dg)
            if denom > 1e-300:
                step = float(s @ s) / denom
            step = min(max(step, 1e-12), 1e6)
        accepted = False
        t = step
        for _ in range(60):
            cand = _renormalize(x - t * r)
            fc = q_frame_potential(cand)
            if fc <= f - 1e-4 * t * rnorm2:
                prev_x, prev_g = x, g
                x, f = cand, fc
                trace.append(f)
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
    gap = f - bound
    return OptimizeResult(
        ensemble=QEnsemble(x, check=False),
        potential=f,
        bound=bound,
        gap=gap,
        converged=gap <= max(gap_tol, 1e-8),
        trace=trace,
        iterations=it,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# coordinate bases for the dimension audit
# ---------------------------------------------------------------------------


def hermitian_basis(d: int) -> np.ndarray:
    """Real basis of Hermitian quaternion d x d matrices: d diagonal units
    plus 4 C(d,2) off-diagonal pairs; d + 4 C(d,2) = d(2d-1) elements."""
    out = []
    for i in range(d):
        m = np.zeros((d, d, 4))
        m[i, i, 0] = 1.0
        out.append(m)
    units = (Q_ONE, Q_I, Q_J, Q_K)
    for i in range(d):
        for j in range(i + 1, d):
            for u in units:
                m = np.zeros((d, d, 4))
                m[i, j] = u
                m[j, i] = qconj(u)
                out.append(m)
    return np.array(out)


def anti_hermitian_basis(d: int) -> np.ndarray:
    """Real basis of anti-Hermitian quaternion matrices: 3d diagonal
    imaginary units plus 4 C(d,2) off-diagonal pairs; 3d + 4 C(d,2)."""
    out = []
    for i in range(d):
        for u in (Q_I, Q_J, Q_K):
            m = np.zeros((d, d, 4))
            m[i, i] = u
            out.append(m)
    units = (Q_ONE, Q_I, Q_J, Q_K)
    for i in range(d):
        for j in range(i + 1, d):
            for u in units:
                m = np.zeros((d, d, 4))
                m[i, j] = u
                m[j, i] = -qconj(u)
                out.append(m)
    return np.array(out)
