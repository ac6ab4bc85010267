"""Regularity and index analysis of square real matrix pencils.

A pencil (E, A) is regular when det(sE - A) is not the zero polynomial.
Regular pencils decompose as S E T = diag(I_d, N), S A T = diag(J, I_a)
with N nilpotent; the nilpotency index nu is the differentiation index of
the DAE E z' = A z + f.  The decomposition is computed by Wong-sequence
deflation with SVD rank decisions rather than by a Jordan-form algorithm:
only (d, a, nu) and the block split are consumed downstream, and Jordan
structure is numerically unstable.  J and N are reduced to real Schur
(quasi-triangular) form.
"""

import cmath
import logging

import numpy as np
import scipy.linalg

from .errors import DataError, IllConditioned, ShapeError, SingularPencil

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10

# Rank decisions are refused when the retained/discarded singular value gap
# is below this factor.
GAP_FACTOR = 10.0


def _as_square(M, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DataError(f"{name} contains non-finite entries")
    return M


class MatrixPencil:
    """Square real pencil (E, A)."""

    def __init__(self, E, A):
        self.E = _as_square(E, "E")
        self.A = _as_square(A, "A")
        if self.E.shape != self.A.shape:
            raise ShapeError(
                f"E and A must have equal shape, got {self.E.shape} vs {self.A.shape}")
        self.n = self.E.shape[0]

    def to_json(self):
        return {"E": self.E.tolist(), "A": self.A.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(np.asarray(data["E"], dtype=float),
                   np.asarray(data["A"], dtype=float))

    def __repr__(self):
        return f"MatrixPencil(n={self.n})"


class WeierstrassForm:
    """Result of the Weierstrass-style decomposition.

    S E T = diag(I_d, N) and S A T = diag(J, I_a) up to the stored
    residuals; N is nilpotent with index nu; J, N are quasi-triangular.
    """

    def __init__(self, S, T, J, N, d, a, nu, res_E, res_A, cond_S, cond_T):
        self.S = S
        self.T = T
        self.J = J
        self.N = N
        self.d = d
        self.a = a
        self.nu = nu
        self.res_E = res_E
        self.res_A = res_A
        self.cond_S = cond_S
        self.cond_T = cond_T

    def __repr__(self):
        return (f"WeierstrassForm(d={self.d}, a={self.a}, nu={self.nu}, "
                f"res_E={self.res_E:.2e}, res_A={self.res_A:.2e})")


class PencilReport:
    """Summary of the structural analysis of one pencil.

    ``mu`` is the strangeness index (nu - 1 when algebraic equations are
    present, otherwise 0); ``nu`` the differentiation index.
    """

    def __init__(self, regular, det_samples, tol, d=None, a=None, nu=None,
                 mu=None, res_E=None, res_A=None):
        self.regular = regular
        self.det_samples = det_samples
        self.tol = tol
        self.d = d
        self.a = a
        self.nu = nu
        self.mu = mu
        self.res_E = res_E
        self.res_A = res_A

    def to_json(self):
        data = {
            "regular": self.regular,
            "tolerances": {"tol": self.tol},
            "det_samples": [
                {"s": [s.real, s.imag], "det": [v.real, v.imag], "scale": sc}
                for s, v, sc in self.det_samples
            ],
        }
        if self.regular:
            data.update({"d": self.d, "a": self.a, "nu": self.nu, "mu": self.mu,
                         "residuals": {"res_E": self.res_E, "res_A": self.res_A}})
        return data


def _det_samples(p, tol):
    """Sample det(sE - A) on a circle; each sample carries a Hadamard scale."""
    n = p.n
    eps = 1e-8
    radius = (np.linalg.norm(p.A) + eps) / (np.linalg.norm(p.E) + eps)
    samples = []
    for k in range(n + 1):
        # Offset angles keep the samples away from the real axis, where the
        # real spectrum would otherwise be met systematically.
        s = radius * cmath.exp(2j * cmath.pi * (k + 0.5) / (n + 1))
        M = s * p.E - p.A
        det = complex(np.linalg.det(M))
        rows = np.sqrt((np.abs(M) ** 2).sum(axis=1))
        scale = float(np.prod(np.maximum(rows, 1e-300)))
        samples.append((s, det, scale))
    return samples


def is_regular(p, tol=DEFAULT_TOL):
    """True when det(sE - A) is not the zero polynomial.

    The determinant is evaluated at n+1 distinct points; a polynomial of
    degree <= n vanishing at all of them is identically zero.  Each sample
    is compared against tol times its Hadamard row bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.n == 0:
        return True
    return any(abs(det) > tol * scale for _, det, scale in _det_samples(p, tol))


def _rank_split(sigma, tol, floor, context):
    """Number of singular values kept at threshold tol * max(sigma_max, floor).

    The floor is the norm of the parent matrix the input was projected from;
    without it a numerically-zero projection (entries of size eps * floor)
    would be ranked relative to its own rounding noise.
    """
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    thresh = tol * max(sigma[0], floor)
    r = int(np.sum(sigma > thresh))
    if 0 < r < sigma.size and sigma[r] > 0.0:
        gap = sigma[r - 1] / sigma[r]
        logger.debug("rank decision (%s): kept %d, gap %.3e", context, r, gap)
        if gap < GAP_FACTOR:
            raise IllConditioned(
                f"ambiguous rank decision in {context}: retained singular value "
                f"{sigma[r - 1]:.3e} within factor {GAP_FACTOR} of discarded "
                f"{sigma[r]:.3e}", retained=sigma[r - 1], discarded=sigma[r])
    return r


def _orth(M, tol, floor, context):
    """Orthonormal basis of the column space of M."""
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0))
    U, sigma, _ = np.linalg.svd(M, full_matrices=False)
    r = _rank_split(sigma, tol, floor, context)
    return U[:, :r]


def _kernel(M, tol, floor, context):
    """Orthonormal basis of the null space of M (columns)."""
    n = M.shape[1]
    if M.shape[0] == 0 or n == 0:
        return np.eye(n)
    U, sigma, Vh = np.linalg.svd(M)
    sigma = np.concatenate([sigma, np.zeros(n - sigma.size)])
    r = _rank_split(sigma, tol, floor, context)
    return Vh[r:].T


def _wong_infinite(E, A, tol):
    """Second Wong sequence W_{k+1} = E^{-1}(A W_k), W_0 = 0.

    Returns (W, nu): the stabilized basis (dimension a) and the number of
    strictly growing steps, which equals the nilpotency index.
    """
    n = E.shape[0]
    scale_E = np.linalg.norm(E, 2) if n else 0.0
    scale_A = np.linalg.norm(A, 2) if n else 0.0
    W = np.zeros((n, 0))
    nu = 0
    for _ in range(n + 1):
        image = _orth(A @ W, tol, scale_A, "wong-W image")
        proj = E - image @ (image.T @ E)
        W_next = _kernel(proj, tol, scale_E, "wong-W kernel")
        if W_next.shape[1] <= W.shape[1]:
            return W, nu
        W = W_next
        nu += 1
    return W, nu


def _wong_finite(E, A, tol):
    """First Wong sequence V_{k+1} = A^{-1}(E V_k), V_0 = R^n."""
    n = E.shape[0]
    scale_E = np.linalg.norm(E, 2) if n else 0.0
    scale_A = np.linalg.norm(A, 2) if n else 0.0
    V = np.eye(n)
    for _ in range(n + 1):
        image = _orth(E @ V, tol, scale_E, "wong-V image")
        proj = A - image @ (image.T @ A)
        V_next = _kernel(proj, tol, scale_A, "wong-V kernel")
        if V_next.shape[1] >= V.shape[1]:
            return V
        V = V_next
    return V


def weierstrass(p, tol=DEFAULT_TOL):
    """Decompose a regular pencil into differential and algebraic parts.

    Raises SingularPencil when the pencil fails the regularity sampling and
    IllConditioned when a rank decision is ambiguous or the deflating
    subspaces do not split R^n cleanly at the tolerance.
    """
    if p.n == 0:
        empty = np.zeros((0, 0))
        return WeierstrassForm(empty, empty, empty, empty, 0, 0, 0,
                               0.0, 0.0, 1.0, 1.0)
    if not is_regular(p, tol):
        raise SingularPencil("pencil is singular at the sampling tolerance")
    E, A, n = p.E, p.A, p.n
    W, nu = _wong_infinite(E, A, tol)
    V = _wong_finite(E, A, tol)
    d, a = V.shape[1], W.shape[1]
    if d + a != n:
        raise IllConditioned(
            f"deflating subspaces split {n} into {d}+{a}; pencil is too close "
            f"to singular for tol={tol:g}")

    # Quasi-triangularize the diagonal blocks without disturbing the split.
    P = np.hstack([E @ V, A @ W])
    try:
        S = np.linalg.solve(P, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise IllConditioned(f"deflating bases do not span R^n: {exc}") from exc
    if d > 0:
        J0 = S[:d] @ A @ V
        _, QJ = scipy.linalg.schur(J0, output="real")
        V = V @ QJ
    if a > 0:
        N0 = S[d:] @ E @ W
        _, QN = scipy.linalg.schur(N0, output="real")
        W = W @ QN
    T = np.hstack([V, W])
    P = np.hstack([E @ V, A @ W])
    cond_P = float(np.linalg.cond(P))
    if not np.isfinite(cond_P) or cond_P > 1e14:
        raise IllConditioned(
            f"transformation matrix condition {cond_P:.2e}; deflating "
            f"subspaces are nearly degenerate")
    S = np.linalg.solve(P, np.eye(n))

    SET = S @ E @ T
    SAT = S @ A @ T
    J = SAT[:d, :d].copy()
    N = SET[d:, d:].copy()
    target_E = np.zeros((n, n))
    target_E[:d, :d] = np.eye(d)
    target_E[d:, d:] = N
    target_A = np.zeros((n, n))
    target_A[:d, :d] = J
    target_A[d:, d:] = np.eye(a)
    res_E = float(np.linalg.norm(SET - target_E))
    res_A = float(np.linalg.norm(SAT - target_A))

    # Cross-check the Wong step count against the nilpotency of N itself.
    if a > 0:
        norm_N = np.linalg.norm(N)
        Npow = np.eye(a)
        nil = 0
        for k in range(1, a + 1):
            Npow = Npow @ N
            if np.linalg.norm(Npow) <= tol * max(1.0, norm_N) ** k:
                nil = k
                break
        else:
            nil = a + 1
        if nil != nu:
            logger.warning("nilpotency cross-check: Wong count %d vs N-power "
                           "count %d; keeping Wong count", nu, nil)
    cond_T = float(np.linalg.cond(T))
    return WeierstrassForm(S, T, J, N, d, a, nu, res_E, res_A, cond_P, cond_T)


def diff_index(p, tol=DEFAULT_TOL):
    """Differentiation index (nilpotency index of N) of a regular pencil."""
    return weierstrass(p, tol).nu


def strangeness_index(w):
    """Strangeness index of a decomposed pencil: nu - 1 when a > 0, else 0."""
    return w.nu - 1 if w.a > 0 else 0


def equivalence_residual(p, w):
    """Frobenius residuals of the reconstruction (S E T, S A T) vs targets."""
    n = p.n
    d = w.d
    SET = w.S @ p.E @ w.T
    SAT = w.S @ p.A @ w.T
    target_E = np.zeros((n, n))
    target_E[:d, :d] = np.eye(d)
    target_E[d:, d:] = w.N
    target_A = np.zeros((n, n))
    target_A[:d, :d] = w.J
    target_A[d:, d:] = np.eye(n - d)
    return (float(np.linalg.norm(SET - target_E)),
            float(np.linalg.norm(SAT - target_A)))


def analyze(p, tol=DEFAULT_TOL):
    """Full PencilReport: regularity plus (d, a, nu, mu) when regular."""
    samples = _det_samples(p, tol) if p.n else []
    regular = True if p.n == 0 else any(
        abs(det) > tol * scale for _, det, scale in samples)
    if not regular:
        return PencilReport(False, samples, tol)
    w = weierstrass(p, tol)
    return PencilReport(True, samples, tol, d=w.d, a=w.a, nu=w.nu,
                        mu=strangeness_index(w), res_E=w.res_E, res_A=w.res_A)
