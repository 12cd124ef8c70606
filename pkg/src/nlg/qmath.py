"""Dense complex linear algebra, canonical states, and depolarizing channels.

Everything here works on plain numpy ``complex128`` arrays in the
computational basis.  The canonical register order for 4-qubit objects is
``[A1, B1, A2, B2]``: pair 1 lives on qubits (0, 1) and pair 2 on qubits
(2, 3), so the 4-qubit depolarizing channel factors exactly as two
independent 2-qubit channels on contiguous blocks.  Operators assembled in
any other order must be moved into this order with :func:`permute_qubits`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_ATOL = 1e-9
TRACE_ATOL = 1e-9
PSD_ATOL = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI = {"I": I2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


class DimensionError(ValueError):
    """Operand dimensions do not match what the operation requires."""


class InvalidStateError(ValueError):
    """A matrix failed the density-matrix invariants."""


def kron(*operators: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more square matrices."""
    if not operators:
        raise DimensionError("kron needs at least one operand")
    out = np.asarray(operators[0], dtype=complex)
    for op in operators[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def epr_state() -> np.ndarray:
    """Density matrix of the two-qubit maximally entangled pair."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1 / np.sqrt(2)
    return np.outer(vec, vec.conj())


def maximally_mixed(dim: int) -> np.ndarray:
    if dim not in (2, 4, 16):
        raise DimensionError(f"unsupported dimension {dim}; expected 2, 4 or 16")
    return np.eye(dim, dtype=complex) / dim


def hermitian_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(matrix)


def check_density_matrix(rho: np.ndarray) -> None:
    """Raise :class:`InvalidStateError` unless ``rho`` is a valid state.

    Checks Hermiticity, unit trace and positive semidefiniteness at the
    module tolerances (1e-9 absolute).
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"not a square matrix: shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > HERMITICITY_ATOL:
        raise InvalidStateError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise InvalidStateError(f"trace {tr} is not 1")
    lo = hermitian_eigenvalues(rho)[0]
    if lo < -PSD_ATOL:
        raise InvalidStateError(f"not PSD: min eigenvalue {lo:.3e}")


def is_density_matrix(rho: np.ndarray) -> bool:
    try:
        check_density_matrix(rho)
    except InvalidStateError:
        return False
    return True


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a full-rank density matrix from the Ginibre ensemble."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class DepolarizingChannel:
    """Depolarizing channel with visibility ``eta``.

    ``eta`` is the visibility of the paper's parameterization: the
    probability of *no* noise on one qubit pair is ``eta**2``, so callers
    must not square it themselves.  ``n_qubits`` selects the two-qubit
    channel (dim-4 states) or its two-pair tensor extension (dim-16).
    """

    eta: float
    n_qubits: int = 2

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.eta}")
        if self.n_qubits not in (2, 4):
            raise DimensionError(f"channel acts on 2 or 4 qubits, not {self.n_qubits}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def _trace_out_pair(rho: np.ndarray, pair: int) -> np.ndarray:
    """Partial trace of a 16x16 state over one pair register (0 or 1)."""
    t = rho.reshape(4, 4, 4, 4)
    return np.trace(t, axis1=pair, axis2=pair + 2)


def apply_depolarizing(channel: DepolarizingChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the depolarizing channel to ``rho`` in canonical register order.

    The 4-qubit form acts as two independent 2-qubit channels on the pair
    registers (qubits 0,1 and qubits 2,3), which reduces to the four-term
    expansion in eta**2 for product inputs.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim, channel.dim):
        raise DimensionError(
            f"state dim {rho.shape} does not match channel dim {channel.dim}"
        )
    vis = channel.eta**2
    if channel.n_qubits == 2:
        return vis * rho + (1 - vis) * np.trace(rho) * np.eye(4) / 4
    eye4 = np.eye(4)
    kept_1 = _trace_out_pair(rho, 1)  # pair-2 register traced out
    kept_2 = _trace_out_pair(rho, 0)
    return (
        vis**2 * rho
        + vis * (1 - vis) * (np.kron(kept_1, eye4 / 4) + np.kron(eye4 / 4, kept_2))
        + (1 - vis) ** 2 * np.trace(rho) * np.eye(16) / 16
    )


def depolarized_epr_pairs(eta: float, n_qubits: int) -> np.ndarray:
    """Depolarized EPR input: one noisy pair (dim 4) or two (dim 16)."""
    pair = apply_depolarizing(DepolarizingChannel(eta, 2), epr_state())
    if n_qubits == 2:
        return pair
    if n_qubits == 4:
        return np.kron(pair, pair)
    raise DimensionError(f"winning states have 2 or 4 qubits, not {n_qubits}")


def permute_qubits(matrix: np.ndarray, perm: tuple[int, ...]) -> np.ndarray:
    """Reorder the qubit registers of an operator or state.

    ``perm[i] = j`` places input qubit ``j`` at output position ``i``.
    For example ``perm=(0, 2, 1, 3)`` swaps the middle two qubits, turning
    an operator assembled as ``A1 (x) A2 (x) B1 (x) B2`` into the canonical
    ``A1 (x) B1 (x) A2 (x) B2`` order.
    """
    matrix = np.asarray(matrix)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    if matrix.shape != (2**n, 2**n):
        raise DimensionError(
            f"matrix shape {matrix.shape} does not match {n} qubits"
        )
    tensor = matrix.reshape((2,) * (2 * n))
    axes = list(perm) + [p + n for p in perm]
    return tensor.transpose(axes).reshape(matrix.shape)
