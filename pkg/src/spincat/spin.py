"""Collective-spin states and operators in the symmetric Dicke basis.

A collection of N spin-1/2 particles restricted to the maximal-spin
(j = N/2) sector is represented on the N+1 Dicke states |n>, where n
counts the number of up-spins.  All operators are tridiagonal (bandwidth
at most 1) in this basis and are stored as banded sparse matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse import dia_array, diags_array
from scipy.special import gammaln

__all__ = [
    "CollectiveSpinParams",
    "OperatorKind",
    "CollectiveOperator",
    "DickeVector",
    "JointState",
    "make_operator",
    "dicke_basis_state",
    "spin_coherent_state",
    "spin_coherent_state_angles",
    "rotated_dicke",
    "product_state",
    "inner_product",
    "scs_overlap",
]


@dataclass(frozen=True)
class CollectiveSpinParams:
    """Size bookkeeping for N spins in the symmetric (j = N/2) sector."""

    n_spins: int

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise ValueError(f"n_spins must be a positive integer, got {self.n_spins!r}")
        object.__setattr__(self, "n_spins", int(self.n_spins))

    @property
    def j(self) -> float:
        """Total spin quantum number N/2 (exact, N/2 is dyadic)."""
        return self.n_spins / 2

    @property
    def dim(self) -> int:
        return self.n_spins + 1

    @property
    def c(self) -> float:
        """Half-integer offset: 0 for even N, 1/2 for odd N."""
        return 0.0 if self.n_spins % 2 == 0 else 0.5


class OperatorKind(Enum):
    JX = "jx"
    JY = "jy"
    JZ = "jz"
    JPLUS = "jplus"
    JMINUS = "jminus"
    JSQUARED = "jsquared"
    NUMBER = "number"


@dataclass(frozen=True)
class CollectiveOperator:
    """A collective spin operator stored as a banded (bandwidth <= 1) matrix."""

    params: CollectiveSpinParams
    kind: OperatorKind
    matrix: dia_array

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, state: "DickeVector") -> np.ndarray:
        if state.params != self.params:
            raise ValueError("operator and state sizes differ")
        return self.matrix @ state.amplitudes


def _ladder_elements(n_spins: int) -> np.ndarray:
    # <n+1| J+ |n> = sqrt((n+1)(N-n));  the same array gives <n-1| J- |n>
    n = np.arange(n_spins)
    return np.sqrt((n + 1.0) * (n_spins - n))


def make_operator(params: CollectiveSpinParams, kind: OperatorKind) -> CollectiveOperator:
    """Build a collective operator in the Dicke basis ordered by ascending n.

    J+ raises the up-spin count with amplitude sqrt((n+1)(N-n)); J- lowers
    it with amplitude sqrt(n(N-n+1)).  NUMBER is Jz + N/2 (the a^dag a
    analogue) and JSQUARED is the constant j(j+1) on this sector.
    """
    if not isinstance(kind, OperatorKind):
        raise TypeError(f"kind must be an OperatorKind, got {kind!r}")
    N = params.n_spins
    dim = params.dim
    n = np.arange(dim)
    ladder = _ladder_elements(N).astype(complex)

    if kind is OperatorKind.JPLUS:
        mat = diags_array([ladder], offsets=[-1], shape=(dim, dim))
    elif kind is OperatorKind.JMINUS:
        mat = diags_array([ladder], offsets=[1], shape=(dim, dim))
    elif kind is OperatorKind.JX:
        mat = diags_array([ladder / 2, ladder / 2], offsets=[-1, 1], shape=(dim, dim))
    elif kind is OperatorKind.JY:
        mat = diags_array([-1j * ladder / 2, 1j * ladder / 2], offsets=[-1, 1], shape=(dim, dim))
    elif kind is OperatorKind.JZ:
        mat = diags_array([(n - N / 2).astype(complex)], offsets=[0], shape=(dim, dim))
    elif kind is OperatorKind.JSQUARED:
        j = params.j
        mat = diags_array([np.full(dim, j * (j + 1), dtype=complex)], offsets=[0], shape=(dim, dim))
    elif kind is OperatorKind.NUMBER:
        mat = diags_array([n.astype(complex)], offsets=[0], shape=(dim, dim))
    else:  # pragma: no cover - closed enum
        raise ValueError(f"unknown operator kind {kind!r}")
    return CollectiveOperator(params, kind, dia_array(mat))


@dataclass(frozen=True)
class DickeVector:
    """Complex amplitudes over the Dicke index n = 0..N of one collective spin."""

    params: CollectiveSpinParams
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.params.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.params.dim},)"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class JointState:
    """Complex amplitudes over (n_a, n_b) for the composite A+B system."""

    params_a: CollectiveSpinParams
    params_b: CollectiveSpinParams
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        expected = (self.params_a.dim, self.params_b.dim)
        if amps.shape != expected:
            raise ValueError(f"amplitude array has shape {amps.shape}, expected {expected}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def dicke_basis_state(params: CollectiveSpinParams, n: int) -> DickeVector:
    """The Dicke basis state |n> (n up-spins)."""
    if not 0 <= n < params.dim:
        raise ValueError(f"Dicke index {n} outside 0..{params.n_spins}")
    amps = np.zeros(params.dim, dtype=complex)
    amps[n] = 1.0
    return DickeVector(params, amps)


def _log_sqrt_binom(n_spins: int) -> np.ndarray:
    n = np.arange(n_spins + 1)
    return 0.5 * (gammaln(n_spins + 1) - gammaln(n + 1) - gammaln(n_spins - n + 1))


def spin_coherent_state(params: CollectiveSpinParams, zeta: complex) -> DickeVector:
    """Spin coherent state: amplitudes C_n = sqrt(C(N,n)) zeta^n / (1+|zeta|^2)^(N/2).

    Evaluated in log space so large N and extreme |zeta| stay finite.
    """
    zeta = complex(zeta)
    if not (np.isfinite(zeta.real) and np.isfinite(zeta.imag)):
        raise ValueError(f"zeta must be finite, got {zeta!r}")
    N = params.n_spins
    amps = np.zeros(params.dim, dtype=complex)
    if zeta == 0:
        amps[0] = 1.0
        return DickeVector(params, amps)
    n = np.arange(params.dim)
    log_mag = _log_sqrt_binom(N) + n * np.log(abs(zeta)) - (N / 2) * np.log1p(abs(zeta) ** 2)
    amps = np.exp(log_mag + 1j * n * np.angle(zeta))
    amps /= np.linalg.norm(amps)
    return DickeVector(params, amps)


def spin_coherent_state_angles(params: CollectiveSpinParams, theta: float, phi: float) -> DickeVector:
    """Spin coherent state at Bloch angles, zeta = e^{-i phi} tan(theta/2).

    Stable at the theta = pi pole, where the state is the all-up Dicke
    state |N>.
    """
    N = params.n_spins
    n = np.arange(params.dim)
    half = 0.5 * float(theta)
    s, co = np.sin(half), np.cos(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = _log_sqrt_binom(N) + n * np.log(s) + (N - n) * np.log(co)
    amps = np.exp(log_mag - 1j * n * float(phi))
    amps[np.isnan(amps)] = 0.0
    nrm = np.linalg.norm(amps)
    if nrm == 0:  # theta == 0 under log of sin
        amps = np.zeros(params.dim, dtype=complex)
        amps[0] = 1.0
        return DickeVector(params, amps)
    return DickeVector(params, amps / nrm)


def rotated_dicke(params: CollectiveSpinParams, m: float, phi: float) -> DickeVector:
    """Eigenvector |D_m^phi> of the rotated Jx operator e^{-i phi Jz} Jx e^{i phi Jz}.

    Parameters
    ----------
    m : float
        Eigenvalue label, one of -N/2, -N/2+1, ..., N/2.
    phi : float
        Rotation angle about z.

    The global phase is fixed at phi = 0 (highest-n amplitude real and
    non-negative) and the phase factors e^{-i phi (n - N/2)} are applied
    afterwards; this reproduces the explicit two-level forms
    (e^{-i phi/2}|up> +/- e^{i phi/2}|down>)/sqrt(2) for N = 1.
    """
    N = params.n_spins
    ladder_index = m + params.j
    k = int(round(ladder_index))
    if abs(ladder_index - k) > 1e-9 or not 0 <= k <= N:
        raise ValueError(f"m={m} is not a Jx eigenvalue for N={N}")
    offdiag = _ladder_elements(N) / 2
    _, vecs = eigh_tridiagonal(np.zeros(params.dim), offdiag, select="i", select_range=(k, k))
    vec = vecs[:, 0]
    if vec[-1] < 0:
        vec = -vec
    n = np.arange(params.dim)
    amps = vec * np.exp(-1j * float(phi) * (n - N / 2))
    return DickeVector(params, amps)


def product_state(a: DickeVector, b: DickeVector) -> JointState:
    """Tensor product |a>_A |b>_B as a joint amplitude array."""
    return JointState(a.params, b.params, np.outer(a.amplitudes, b.amplitudes))


def inner_product(x, y) -> complex:
    """<x|y>, conjugate-linear in the first argument."""
    if isinstance(x, DickeVector) and isinstance(y, DickeVector):
        if x.params != y.params:
            raise ValueError("Dicke vectors live on different spin sizes")
    elif isinstance(x, JointState) and isinstance(y, JointState):
        if (x.params_a, x.params_b) != (y.params_a, y.params_b):
            raise ValueError("joint states live on different composite systems")
    else:
        raise ValueError(f"cannot take inner product of {type(x).__name__} and {type(y).__name__}")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def scs_overlap(n_spins: int, zeta: complex, eta: complex) -> complex:
    """Closed-form overlap <zeta|eta> = ((1 + conj(zeta) eta)^2 / ((1+|zeta|^2)(1+|eta|^2)))^(N/2)."""
    num = 1 + np.conj(zeta) * eta
    den = (1 + abs(zeta) ** 2) * (1 + abs(eta) ** 2)
    return complex(num**n_spins / den ** (n_spins / 2))
