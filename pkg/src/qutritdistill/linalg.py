"""Dense complex linear algebra for bipartite qutrit analysis.

All functions take and return plain numpy arrays (complex double precision)
with value semantics: inputs are never mutated. Matrices here are small
(9x9 and below in practice, nothing beyond ~100x100), so everything runs on
numpy's LAPACK-backed dense routines.

Conventions:
    - bipartite vectors index as |a,b> -> position dimB*a + b (row-major);
    - partial transpose acts on the first (A) factor;
    - Hermitian eigenvalues come back ascending, singular values descending.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERM_TOL = 1e-12
UNITARY_TOL = 1e-10
MINOR_IMAG_TOL = 1e-10


class NotHermitian(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


class NonRealMinor(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


class EigenDecomposition(NamedTuple):
    values: np.ndarray      # real, ascending
    vectors: np.ndarray     # orthonormal columns, vectors[:, k] pairs values[k]


class Inertia(NamedTuple):
    negative: int
    zero: int
    positive: int


class TakagiFactorization(NamedTuple):
    unitary: np.ndarray
    singular_values: np.ndarray   # nonnegative, descending


class PsdCertificate(NamedTuple):
    min_eigenvalue: float
    eigenvector: np.ndarray


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={a.ndim}")
    return a


def herm_defect(m) -> float:
    a = as_matrix(m)
    return float(np.abs(a - a.conj().T).max())


def check_hermitian(m, tol: float = HERM_TOL) -> np.ndarray:
    """Return m as an array, raising NotHermitian if ||M - M^dag|| is too big.

    The tolerance is relative to max(1, ||M||_max).
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"not square: {a.shape}")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
    if herm_defect(a) > tol * scale:
        raise NotHermitian(f"Hermiticity defect {herm_defect(a):.3e} exceeds {tol * scale:.3e}")
    return a


def eig_hermitian(m) -> EigenDecomposition:
    """Full spectral decomposition of a Hermitian matrix, eigenvalues ascending."""
    a = check_hermitian(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - not reachable at these sizes
        raise NoConvergence(str(exc)) from exc
    return EigenDecomposition(values=w, vectors=v)


def spectral_norm_hermitian(m) -> float:
    w, _ = eig_hermitian(m)
    return float(np.abs(w).max()) if w.size else 0.0


def partial_transpose(m, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose the first tensor factor: block (i,j) of the output equals
    block (j,i) of the input, blocks being dim_b x dim_b."""
    a = as_matrix(m)
    n = dim_a * dim_b
    if a.shape != (n, n):
        raise DimensionMismatch(f"expected {(n, n)}, got {a.shape}")
    return (
        a.reshape(dim_a, dim_b, dim_a, dim_b)
        .transpose(2, 1, 0, 3)
        .reshape(n, n)
        .copy()
    )


def partial_trace(m, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one factor; keep is "A" or "B"."""
    a = as_matrix(m)
    n = dim_a * dim_b
    if a.shape != (n, n):
        raise DimensionMismatch(f"expected {(n, n)}, got {a.shape}")
    t = a.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    if keep == "B":
        return np.einsum("abad->bd", t)
    raise ValueError("keep must be 'A' or 'B'")


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def svd(a):
    """A = U diag(s) V^dag with s descending; returns (U, s, V)."""
    m = as_matrix(a)
    u, s, vh = np.linalg.svd(m)
    return u, s, vh.conj().T


def matrix_rank(a, tol: float | None = None) -> int:
    m = as_matrix(a)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    if tol is None:
        tol = 1e-9 * s[0]
    return int(np.count_nonzero(s > tol))


def takagi(a) -> TakagiFactorization:
    """Takagi factorization A = U diag(s) U^T of a complex symmetric matrix.

    Route: embed into the real symmetric matrix [[Re A, Im A], [Im A, -Re A]].
    Its spectrum is the symmetric set {+-s_j}; an eigenvector (x; y) at
    eigenvalue s > 0 yields a con-eigenvector u = x + iy with A conj(u) = s u,
    and the map (x; y) -> (-y; x) carries the +s eigenspace onto the -s
    eigenspace, which forces complex orthonormality of the u's even inside
    degenerate clusters. Zero singular values get columns from an orthonormal
    completion; they multiply zeros, so the reconstruction is unaffected and
    U is unique only up to mixing inside degenerate clusters.
    """
    m = as_matrix(a)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"not square: {m.shape}")
    scale = max(1.0, float(np.abs(m).max()) if m.size else 0.0)
    if float(np.abs(m - m.T).max()) > 1e-12 * scale:
        raise NotSymmetric("input is not complex symmetric (A != A^T)")
    re, im = m.real, m.imag
    big = np.block([[re, im], [im, -re]])
    w, v = np.linalg.eigh(big)       # ascending
    order = np.argsort(w)[::-1]      # descending: the nonnegative half first
    w = w[order]
    v = v[:, order]
    s_all = w[:n]
    smax = float(s_all[0]) if n else 0.0
    cut = 1e-12 * max(smax, 1e-300)
    cols = []
    svals = []
    for k in range(n):
        if s_all[k] > cut:
            x, y = v[:n, k], v[n:, k]
            cols.append(x + 1j * y)
            svals.append(float(s_all[k]))
    u_pos = np.array(cols, dtype=complex).T if cols else np.zeros((n, 0), dtype=complex)
    r = u_pos.shape[1]
    if r < n:
        # orthonormal completion for the (numerical) null space
        proj = np.eye(n, dtype=complex) - u_pos @ u_pos.conj().T
        q, _ = np.linalg.qr(proj)
        # pick the columns of q with the largest residual inside the complement
        resid = np.linalg.norm(proj @ q, axis=0)
        fill = q[:, np.argsort(resid)[::-1][: n - r]]
        u = np.hstack([u_pos, fill])
        svals += [0.0] * (n - r)
    else:
        u = u_pos
    s = np.array(svals)
    return TakagiFactorization(unitary=u, singular_values=s)


def inertia_of(m, zero_tol: float | None = None) -> Inertia:
    """Counts of eigenvalues below -tol, within +-tol, and above +tol.

    Default tol is 1e-10 times the spectral norm.
    """
    dec = eig_hermitian(m)
    w = dec.values
    if zero_tol is None:
        norm2 = float(np.abs(w).max()) if w.size else 0.0
        zero_tol = 1e-10 * max(norm2, 1e-300)
    if zero_tol <= 0:
        raise ValueError("zero_tol must be positive")
    neg = int(np.count_nonzero(w < -zero_tol))
    pos = int(np.count_nonzero(w > zero_tol))
    return Inertia(negative=neg, zero=len(w) - neg - pos, positive=pos)


def leading_principal_minors(m) -> np.ndarray:
    """Determinants of the k x k top-left submatrices, k = 1..n, as reals.

    Minors of a Hermitian matrix are real; the imaginary residue is checked
    against 1e-10 * max(1, |minor|) and dropped, raising NonRealMinor beyond.
    """
    a = check_hermitian(m)
    n = a.shape[0]
    out = np.empty(n)
    for k in range(1, n + 1):
        d = complex(np.linalg.det(a[:k, :k]))
        if abs(d.imag) > MINOR_IMAG_TOL * max(1.0, abs(d)):
            raise NonRealMinor(f"minor {k} has imaginary part {d.imag:.3e}")
        out[k - 1] = d.real
    return out


def is_psd(m, tol: float = 1e-10):
    """PSD verdict with a certificate: (verdict, (min eigenvalue, eigenvector)).

    The eigenvector doubles as a negativity witness when the verdict is False.
    """
    dec = eig_hermitian(m)
    lam = float(dec.values[0])
    vec = dec.vectors[:, 0]
    return lam >= -tol, PsdCertificate(min_eigenvalue=lam, eigenvector=vec)
