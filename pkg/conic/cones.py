"""Nesterov-Todd scalings for the three cone kinds

For a strictly interior pair (x, z) of one block, the NT scaling W satisfies

    lam = W z = W^{-T} x

and the solver works with the scaled point `lam` and the Jordan product of
the block's algebra (elementwise for NonNeg, the arrow product for SOC, the
symmetrized matrix product for PSD). Every scaling exposes the same methods,
so the solver never branches on cone kind.
"""
import math

import numpy as np
import scipy.sparse as sps
from scipy.linalg import LinAlgError, cholesky, solve_triangular, svd

from conic.program import ConeBlock, ConeKind
from conic.svec import smat, smat_batch, svec_batch, svec_length


class InteriorLost(ArithmeticError):
    """x or z left the interior of its cone (or is numerically on the boundary)"""


def _dense(M) -> np.ndarray:
    return M.toarray() if sps.issparse(M) else np.asarray(M)


def identity_point(block: ConeBlock) -> np.ndarray:
    """Jordan identity e of the block"""
    if block.kind == ConeKind.NONNEG:
        return np.ones(block.size)
    if block.kind == ConeKind.SECOND_ORDER:
        e = np.zeros(block.size)
        e[0] = 1.0
        return e
    rows, cols = np.triu_indices(block.size)
    return (rows == cols).astype(float)


def _sym_svec(M: np.ndarray) -> np.ndarray:
    return svec_batch((0.5 * (M + M.T))[None])[0]


class NonNegScaling:
    def __init__(self, x: np.ndarray, z: np.ndarray):
        if np.any(x <= 0) or np.any(z <= 0):
            raise InteriorLost("nonnegative block left the orthant")
        self.d = x / z
        self.wv = np.sqrt(self.d)
        self.lam = np.sqrt(x * z)

    def w(self, v):
        return self.wv * v

    def winv_t(self, v):
        return v / self.wv

    def w_t(self, v):
        return self.wv * v

    def h(self, v):
        return self.d * v

    def normal(self, A) -> np.ndarray:
        if sps.issparse(A):
            return _dense(A @ sps.diags(self.d) @ A.T)
        return (A * self.d) @ A.T

    def jordan(self, u, v):
        return u * v

    def lam_solve(self, r):
        return r / self.lam

    def max_step(self, d) -> float:
        neg = d < 0
        if not np.any(neg):
            return math.inf
        return float(np.min(-self.lam[neg] / d[neg]))


def _jnorm(v: np.ndarray) -> float:
    """sqrt(v0^2 - |v1|^2), InteriorLost when v is not strictly inside"""
    tail = float(np.linalg.norm(v[1:]))
    if v[0] <= tail:
        raise InteriorLost("second-order block left the cone")
    return math.sqrt((v[0] - tail) * (v[0] + tail))


def _hyperbolic(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """H(w) v for unit hyperbolic w (w'Jw = 1, w0 > 0)

    H(w) = [[w0, w1'], [w1, I + w1 w1'/(1 + w0)]] maps e to w and the cone
    onto itself; H(w)^{-1} = H(Jw).
    """
    w0, w1 = w[0], w[1:]
    v0, v1 = v[0], v[1:]
    dot = float(w1 @ v1)
    out = np.empty_like(v)
    out[0] = w0 * v0 + dot
    out[1:] = v0 * w1 + v1 + w1 * (dot / (1.0 + w0))
    return out


def _flip(v: np.ndarray) -> np.ndarray:
    out = -v
    out[0] = v[0]
    return out


class SecondOrderScaling:
    def __init__(self, x: np.ndarray, z: np.ndarray):
        nx, nz = _jnorm(x), _jnorm(z)
        xb, zb = x / nx, z / nz
        gamma = math.sqrt(max((1.0 + float(xb @ zb)) / 2.0, 0.0))
        if gamma <= 0:
            raise InteriorLost("degenerate second-order scaling")
        self.wvec = (xb + _flip(zb)) / (2.0 * gamma)
        self.beta = math.sqrt(nx / nz)
        self.lam = self.w(z)
        # lam'J lam = nx nz exactly; recomputing it from lam can round to <= 0
        self.nu = math.sqrt(nx * nz)

    def w(self, v):
        return self.beta * _hyperbolic(self.wvec, v)

    def winv_t(self, v):
        return _hyperbolic(_flip(self.wvec), v) / self.beta

    def w_t(self, v):
        return self.w(v)

    def h(self, v):
        # W'W = beta^2 (2 w w' - J)
        return self.beta ** 2 * (2.0 * self.wvec * float(self.wvec @ v) - _flip(v))

    def normal(self, A) -> np.ndarray:
        Aw = np.asarray(A @ self.wvec).ravel()
        head = _dense(A[:, [0]]).ravel()
        tail = A[:, 1:]
        AJA = np.outer(head, head) - _dense(tail @ tail.T)
        return self.beta ** 2 * (2.0 * np.outer(Aw, Aw) - AJA)

    def jordan(self, u, v):
        out = np.empty_like(u)
        out[0] = float(u @ v)
        out[1:] = u[0] * v[1:] + v[0] * u[1:]
        return out

    def lam_solve(self, r):
        lam = self.lam
        det = self.nu ** 2
        out = np.empty_like(r)
        out[0] = (lam[0] * r[0] - float(lam[1:] @ r[1:])) / det
        out[1:] = (r[1:] - out[0] * lam[1:]) / lam[0]
        return out

    def max_step(self, d) -> float:
        nu = self.nu
        lb = self.lam / nu
        dt = _hyperbolic(_flip(lb), d) / nu
        t = float(np.linalg.norm(dt[1:])) - dt[0]
        return 1.0 / t if t > 0 else math.inf


class PSDScaling:
    def __init__(self, x: np.ndarray, z: np.ndarray, side: int):
        self.side = side
        try:
            L = cholesky(smat(x), lower=True)
            Rz = cholesky(smat(z), lower=True)
        except LinAlgError as e:
            raise InteriorLost(f"PSD block lost definiteness: {e}") from e

        _, sig, Vt = svd(Rz.T @ L)
        if np.any(sig <= 0):
            raise InteriorLost("PSD scaling is singular")
        Linv = solve_triangular(L, np.eye(side), lower=True)
        self.sig = sig
        self.G = (L @ Vt.T) / np.sqrt(sig)
        self.Ginv = (np.sqrt(sig)[:, None] * Vt) @ Linv
        self.R = self.G @ self.G.T
        rows, cols = np.triu_indices(side)
        self.lam = np.where(rows == cols, sig[rows], 0.0)

    def w(self, v):
        return _sym_svec(self.G.T @ smat(v) @ self.G)

    def winv_t(self, v):
        return _sym_svec(self.Ginv @ smat(v) @ self.Ginv.T)

    def w_t(self, v):
        return _sym_svec(self.G @ smat(v) @ self.G.T)

    def h(self, v):
        return _sym_svec(self.R @ smat(v) @ self.R)

    def normal(self, A: np.ndarray) -> np.ndarray:
        S = smat_batch(A, self.side)
        T = self.R @ S @ self.R
        return A @ svec_batch(T).T

    def jordan(self, u, v):
        U, V = smat(u), smat(v)
        return _sym_svec(0.5 * (U @ V + V @ U))

    def lam_solve(self, r):
        Rm = smat(r)
        U = 2.0 * Rm / (self.sig[:, None] + self.sig[None, :])
        return _sym_svec(U)

    def max_step(self, d) -> float:
        D = smat(d)
        root = np.sqrt(self.sig)
        Ds = D / np.outer(root, root)
        lmin = float(np.linalg.eigvalsh(0.5 * (Ds + Ds.T))[0])
        return -1.0 / lmin if lmin < 0 else math.inf


def make_scaling(block: ConeBlock, x: np.ndarray, z: np.ndarray):
    if block.kind == ConeKind.NONNEG:
        return NonNegScaling(x, z)
    if block.kind == ConeKind.SECOND_ORDER:
        return SecondOrderScaling(x, z)
    if x.size != svec_length(block.size):
        raise InteriorLost(f"PSD block of side {block.size} got {x.size} slots")
    return PSDScaling(x, z, block.size)
