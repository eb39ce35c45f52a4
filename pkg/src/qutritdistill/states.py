"""Rank-five symmetric two-qutrit state families and local transformations.

The five shared eigenvectors live in the symmetric subspace of C3 x C3:
three symmetrized level pairs, the 00-11 difference, and the traceless
diagonal direction 00+11-2*22. A family state fixes one eigenvalue at x and
splits the rest of the unit trace evenly across the other four eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from ._fmt import sig17

DIM_A = 3
DIM_B = 3
DIM = DIM_A * DIM_B


class OutOfRange(ValueError):
    pass


class ZeroVector(ValueError):
    pass


def basis_ket(a: int, b: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[DIM_B * a + b] = 1.0
    return v


def swap_operator() -> np.ndarray:
    s = np.zeros((DIM, DIM))
    for a in range(DIM_A):
        for b in range(DIM_B):
            s[DIM_B * b + a, DIM_B * a + b] = 1.0
    return s


SWAP = swap_operator()


def symmetric_basis() -> np.ndarray:
    """The five shared eigenvectors as rows of a (5, 9) array.

    Order: sym(0,1), sym(1,2), sym(0,2), (00 - 11)/sqrt2, (00 + 11 - 2*22)/sqrt6.
    """
    sym01 = (basis_ket(0, 1) + basis_ket(1, 0)) / np.sqrt(2)
    sym12 = (basis_ket(1, 2) + basis_ket(2, 1)) / np.sqrt(2)
    sym02 = (basis_ket(0, 2) + basis_ket(2, 0)) / np.sqrt(2)
    diag_diff = (basis_ket(0, 0) - basis_ket(1, 1)) / np.sqrt(2)
    diag_trace = (basis_ket(0, 0) + basis_ket(1, 1) - 2 * basis_ket(2, 2)) / np.sqrt(6)
    return np.vstack([sym01, sym12, sym02, diag_diff, diag_trace])


# case id -> index of the distinguished basis vector in symmetric_basis()
CASE_INDEX = {"i": 0, "ii": 3, "iii": 1, "iv": 2, "v": 4}
CASES = tuple(CASE_INDEX)


@dataclass(frozen=True)
class QutritState:
    """A 9x9 density matrix plus its five defining eigenvalues.

    degenerate flags an eigenvalue hitting zero (rank drop below five).
    """

    rho: np.ndarray
    eigenvalues: np.ndarray
    case_id: str | None = None
    x: float | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class LocalOperator:
    op_a: np.ndarray
    op_b: np.ndarray
    unitary_flag: bool = False

    def __post_init__(self):
        if self.unitary_flag:
            for op in (self.op_a, self.op_b):
                m = np.asarray(op, dtype=complex)
                if m.shape[0] != m.shape[1]:
                    raise linalg.DimensionMismatch("unitary operators must be square")
                if np.abs(m @ m.conj().T - np.eye(m.shape[0])).max() > linalg.UNITARY_TOL:
                    raise ValueError("operator flagged unitary is not unitary")


def build_family(case_id: str, x: float) -> QutritState:
    """State with eigenvalue x on the case's distinguished eigenvector and
    (1-x)/4 on the other four. x is accepted on the closed interval [0, 1];
    endpoints produce rank-degenerate states carried with degenerate=True."""
    if case_id not in CASE_INDEX:
        raise ValueError(f"unknown case {case_id!r}; expected one of {CASES}")
    if not (0.0 <= x <= 1.0):
        raise OutOfRange(f"x={x} outside [0, 1]")
    lam = np.full(5, (1.0 - x) / 4.0)
    lam[CASE_INDEX[case_id]] = x
    basis = symmetric_basis()
    rho = np.zeros((DIM, DIM), dtype=complex)
    for w, vec in zip(lam, basis):
        rho += w * np.outer(vec, vec.conj())
    return QutritState(
        rho=rho,
        eigenvalues=lam,
        case_id=case_id,
        x=float(x),
        degenerate=bool(np.any(lam < 1e-15)),
    )


def uniform_state_on_span(vectors) -> QutritState:
    """Equal-weight state supported on the span of the given 9-vectors.

    Orthonormalizes the span; useful for states specified by their range."""
    vs = np.array([np.asarray(v, dtype=complex) for v in vectors])
    q, r = np.linalg.qr(vs.T)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
    basis = q[:, keep]
    k = basis.shape[1]
    if k == 0:
        raise ZeroVector("span is empty")
    rho = (basis @ basis.conj().T) / k
    lam = np.full(k, 1.0 / k)
    return QutritState(rho=rho, eigenvalues=lam)


def hadamard_on_01() -> np.ndarray:
    """Real orthogonal mixer of levels 0 and 1 (level 2 untouched)."""
    k = np.eye(3)
    k[0, 0] = k[0, 1] = k[1, 0] = 1 / np.sqrt(2)
    k[1, 1] = -1 / np.sqrt(2)
    return k


def phase_mix_on_01() -> np.ndarray:
    """Unitary sending levels 0,1 to their +-i phase mixtures, level 2 fixed."""
    k = np.eye(3, dtype=complex)
    k[0, 0], k[0, 1] = 1 / np.sqrt(2), 1j / np.sqrt(2)
    k[1, 0], k[1, 1] = 1 / np.sqrt(2), -1j / np.sqrt(2)
    return k


def apply_local(state: QutritState | np.ndarray, op: LocalOperator) -> np.ndarray:
    """(opA x opB) rho (opA x opB)^dag, not renormalized."""
    rho = state.rho if isinstance(state, QutritState) else np.asarray(state, dtype=complex)
    big = np.kron(np.asarray(op.op_a, dtype=complex), np.asarray(op.op_b, dtype=complex))
    if big.shape[1] != rho.shape[0]:
        raise linalg.DimensionMismatch(
            f"operator acts on dimension {big.shape[1]}, state has {rho.shape[0]}"
        )
    return big @ rho @ big.conj().T


def normalize(m: np.ndarray) -> np.ndarray:
    """Scale to unit trace (display helper; the library keeps raw scaling)."""
    t = complex(np.trace(m)).real
    if abs(t) < 1e-300:
        raise ZeroVector("trace is zero")
    return m / t


def from_density(m: np.ndarray, case_id=None, x=None) -> QutritState:
    """Wrap an arbitrary density matrix (renormalized to unit trace)."""
    rho = linalg.as_matrix(np.asarray(m, dtype=complex))
    linalg.check_hermitian(rho)
    rho = normalize(0.5 * (rho + rho.conj().T))
    lam = np.linalg.eigvalsh(rho)
    return QutritState(rho=rho, eigenvalues=lam, case_id=case_id, x=x,
                       degenerate=bool(np.any(lam < 1e-15)))


def range_kernel(state: QutritState | np.ndarray, tol: float = 1e-10):
    """Orthonormal bases (columns) of the range and kernel of a PSD matrix."""
    rho = state.rho if isinstance(state, QutritState) else np.asarray(state, dtype=complex)
    dec = linalg.eig_hermitian(rho)
    scale = max(float(dec.values.max()), 1e-300)
    mask = dec.values > tol * scale
    rng = dec.vectors[:, mask]
    ker = dec.vectors[:, ~mask]
    return rng, ker


def coefficient_matrix(v: np.ndarray, dim_a: int = DIM_A, dim_b: int = DIM_B) -> np.ndarray:
    vec = np.asarray(v, dtype=complex).reshape(-1)
    if vec.size != dim_a * dim_b:
        raise linalg.DimensionMismatch(f"vector length {vec.size} != {dim_a * dim_b}")
    return vec.reshape(dim_a, dim_b)


def schmidt_rank(v, dim_a: int = DIM_A, dim_b: int = DIM_B, tol: float = 1e-9) -> int:
    vec = np.asarray(v, dtype=complex).reshape(-1)
    nrm = float(np.linalg.norm(vec))
    if nrm == 0.0:
        raise ZeroVector("cannot take the Schmidt rank of the zero vector")
    mat = coefficient_matrix(vec / nrm, dim_a, dim_b)
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.count_nonzero(s > tol))


def state_to_json(state: QutritState) -> dict:
    rho = state.rho
    return {
        "case": state.case_id,
        "x": None if state.x is None else float(state.x),
        "rho_re": [[float(rho[i, j].real) for j in range(DIM)] for i in range(DIM)],
        "rho_im": [[float(rho[i, j].imag) for j in range(DIM)] for i in range(DIM)],
    }


def state_from_json(doc: dict) -> QutritState:
    re = np.array(doc["rho_re"], dtype=float)
    im = np.array(doc["rho_im"], dtype=float)
    rho = re + 1j * im
    dec = linalg.eig_hermitian(rho)
    lam = dec.values[dec.values > 1e-12][::-1]
    return QutritState(
        rho=rho,
        eigenvalues=lam,
        case_id=doc.get("case"),
        x=doc.get("x"),
    )


def format_probability(x: float) -> str:
    return sig17(x)
