"""Composite-system Hamiltonians and exact propagation.

The exchange Hamiltonian conserves the total excitation n_a + n_b, so the
joint space splits into blocks of size at most min(N_A, N_B) + 1.  Each
block is diagonalized once (and cached on the operator), after which any
number of time points costs a few small mat-vecs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.sparse import dia_array, eye_array, kron

from .spin import CollectiveSpinParams, JointState, OperatorKind, make_operator

__all__ = [
    "Picture",
    "HamiltonianSpec",
    "ExcitationBlock",
    "JointOperator",
    "Trajectory",
    "NonConservingOperatorError",
    "build_hamiltonian",
    "excitation_blocks",
    "evolve",
    "propagate",
    "total_excitation_operator",
]

OFF_BLOCK_TOL = 1e-12


class Picture(Enum):
    LAB = "lab"
    INTERACTION = "interaction"


class NonConservingOperatorError(ValueError):
    """Raised when an operator has entries connecting different n_a + n_b sectors."""


@dataclass(frozen=True)
class HamiltonianSpec:
    """Frequencies, coupling and picture selection for the exchange model.

    With ``renormalized`` set, ``coupling`` is read as lambda-tilde and the
    effective coupling is lambda-tilde / sqrt(N_A N_B).
    """

    omega_a: float = 0.0
    omega_b: float = 0.0
    coupling: float = 1.0
    renormalized: bool = False
    picture: Picture = Picture.INTERACTION

    def __post_init__(self):
        if not np.isfinite(self.coupling):
            raise ValueError(f"coupling must be finite, got {self.coupling!r}")
        if not (np.isfinite(self.omega_a) and np.isfinite(self.omega_b)):
            raise ValueError("frequencies must be finite")

    @property
    def detuning(self) -> float:
        return self.omega_a - self.omega_b

    def effective_coupling(self, pa: CollectiveSpinParams, pb: CollectiveSpinParams) -> float:
        lam = float(self.coupling)
        if self.renormalized:
            lam /= np.sqrt(pa.n_spins * pb.n_spins)
        return lam


@dataclass(frozen=True)
class ExcitationBlock:
    """One invariant n_a + n_b = nu sector of a joint operator."""

    nu: int
    indices: tuple  # ordered (n_a, n_b) pairs
    block_matrix: np.ndarray


@dataclass
class JointOperator:
    """Dense operator on the joint space, row-major index n_a * dim_b + n_b."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray
    _spectra: list | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        expected = (self.dim_a * self.dim_b, self.dim_a * self.dim_b)
        if self.matrix.shape != expected:
            raise ValueError(f"matrix shape {self.matrix.shape} != {expected}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def block_spectra(self) -> list:
        """Eigendecomposition per excitation block, cached.

        Falls back to a single all-index block for operators that do not
        conserve the total excitation.
        """
        if self._spectra is None:
            try:
                items = [
                    (np.array([na * self.dim_b + nb for na, nb in blk.indices]), blk)
                    for blk in excitation_blocks(self)
                ]
            except NonConservingOperatorError:
                items = [(np.arange(self.dim), ExcitationBlock(-1, (), self.matrix))]
            spectra = []
            for rows, blk in items:
                w, v = self._eigh(blk)
                spectra.append((rows, w, v))
            self._spectra = spectra
        return self._spectra

    @staticmethod
    def _eigh(blk: ExcitationBlock):
        try:
            return np.linalg.eigh(blk.block_matrix)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on Hermitian is robust
            raise np.linalg.LinAlgError(
                f"eigendecomposition failed on excitation block nu={blk.nu}: {exc}"
            ) from exc


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus the evolved states at each point."""

    times: np.ndarray
    states: list

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if len(self.states) != times.size:
            raise ValueError("times and states lengths differ")
        for st in self.states:
            if abs(st.norm() - 1.0) > 1e-10:
                raise ValueError("trajectory state is not unit-norm")
        object.__setattr__(self, "times", times)


def _sparse_op(params: CollectiveSpinParams, kind: OperatorKind) -> dia_array:
    return make_operator(params, kind).matrix


def build_hamiltonian(
    pa: CollectiveSpinParams, pb: CollectiveSpinParams, spec: HamiltonianSpec
) -> JointOperator:
    """Assemble the exchange Hamiltonian on the joint Dicke basis.

    Lab picture:  w_A (Jz_A + N_A/2) + w_B (Jz_B + N_B/2) + lam (Ja+ Jb- + Ja- Jb+).
    Interaction picture:  Delta (Jz_A + N_A/2) + lam (exchange), Delta = w_A - w_B.
    """
    lam = spec.effective_coupling(pa, pb)
    num_a = _sparse_op(pa, OperatorKind.NUMBER)
    num_b = _sparse_op(pb, OperatorKind.NUMBER)
    id_a = eye_array(pa.dim, dtype=complex)
    id_b = eye_array(pb.dim, dtype=complex)
    exchange = kron(_sparse_op(pa, OperatorKind.JPLUS), _sparse_op(pb, OperatorKind.JMINUS)) + kron(
        _sparse_op(pa, OperatorKind.JMINUS), _sparse_op(pb, OperatorKind.JPLUS)
    )
    if spec.picture is Picture.LAB:
        h = spec.omega_a * kron(num_a, id_b) + spec.omega_b * kron(id_a, num_b) + lam * exchange
    elif spec.picture is Picture.INTERACTION:
        h = spec.detuning * kron(num_a, id_b) + lam * exchange
    else:  # pragma: no cover - closed enum
        raise ValueError(f"unknown picture {spec.picture!r}")
    return JointOperator(pa.dim, pb.dim, h.toarray().astype(complex))


def excitation_blocks(op: JointOperator) -> list[ExcitationBlock]:
    """Split a joint operator into its n_a + n_b = nu blocks.

    Raises NonConservingOperatorError if any off-block entry exceeds
    1e-12 in magnitude.
    """
    na = np.repeat(np.arange(op.dim_a), op.dim_b)
    nb = np.tile(np.arange(op.dim_b), op.dim_a)
    nu = na + nb
    off_block = np.abs(op.matrix[nu[:, None] != nu[None, :]])
    if off_block.size and off_block.max() > OFF_BLOCK_TOL:
        raise NonConservingOperatorError(
            f"operator couples different excitation sectors (max off-block entry {off_block.max():.3e})"
        )
    blocks = []
    for v in range(op.dim_a + op.dim_b - 1):
        flat = np.nonzero(nu == v)[0]
        # ascending n_a within the block
        flat = flat[np.argsort(na[flat], kind="stable")]
        pairs = tuple((int(na[i]), int(nb[i])) for i in flat)
        blocks.append(ExcitationBlock(v, pairs, op.matrix[np.ix_(flat, flat)]))
    return blocks


def propagate(op: JointOperator, amplitudes: np.ndarray, times: np.ndarray) -> np.ndarray:
    """exp(-i t H) applied to a flat amplitude vector, for each t.

    Returns an array of shape (len(times), dim).  Uses the cached
    per-block eigendecompositions.
    """
    times = np.asarray(times, dtype=float)
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    if psi.size != op.dim:
        raise ValueError(f"state dimension {psi.size} != operator dimension {op.dim}")
    out = np.zeros((times.size, op.dim), dtype=complex)
    for rows, w, v in op.block_spectra():
        coeff = v.conj().T @ psi[rows]
        phases = np.exp(-1j * np.outer(times, w))
        out[:, rows] = (phases * coeff) @ v.T
    return out


def evolve(op: JointOperator, psi0: JointState, times) -> Trajectory:
    """Exact evolution of a joint state over a strictly increasing time grid."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    if (psi0.params_a.dim, psi0.params_b.dim) != (op.dim_a, op.dim_b):
        raise ValueError("state and operator dimensions differ")
    if abs(psi0.norm() - 1.0) > 1e-10:
        raise ValueError("initial state must be unit-norm")
    flat = propagate(op, psi0.amplitudes, times)
    shape = (op.dim_a, op.dim_b)
    states = [
        JointState(psi0.params_a, psi0.params_b, flat[k].reshape(shape)) for k in range(times.size)
    ]
    return Trajectory(times, states)


def total_excitation_operator(pa: CollectiveSpinParams, pb: CollectiveSpinParams) -> JointOperator:
    """Number operator of the composite system, (Jz_A + N_A/2) + (Jz_B + N_B/2)."""
    num_a = _sparse_op(pa, OperatorKind.NUMBER)
    num_b = _sparse_op(pb, OperatorKind.NUMBER)
    mat = kron(num_a, eye_array(pb.dim, dtype=complex)) + kron(eye_array(pa.dim, dtype=complex), num_b)
    return JointOperator(pa.dim, pb.dim, mat.toarray().astype(complex))
