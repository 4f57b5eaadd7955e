"""Truncated-Fock-space simulator of the bosonic limits (Jaynes-Cummings /
Tavis-Cummings), used to cross-validate the finite-spin model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dynamics import JointOperator, propagate
from .spin import CollectiveSpinParams, OperatorKind, make_operator, spin_coherent_state

__all__ = [
    "TAIL_TOL",
    "FockState",
    "BosonModelSpec",
    "default_cutoff",
    "coherent_state",
    "build_boson_hamiltonian",
    "compare_spin_to_boson",
]

TAIL_TOL = 1e-10


def default_cutoff(alpha: complex) -> int:
    """Photon-number cutoff with a ten-sigma Poisson tail margin."""
    mean = abs(alpha) ** 2
    return math.ceil(mean + 10 * math.sqrt(mean + 1) + 10)


@dataclass(frozen=True)
class FockState:
    """Truncated photon-number amplitudes over n = 0..cutoff."""

    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.cutoff + 1,):
            raise ValueError(f"amplitudes must have length {self.cutoff + 1}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class BosonModelSpec:
    """Mode frequency, ancilla frequency, bare coupling and truncation."""

    omega_a: float = 0.0
    omega_b: float = 0.0
    coupling_tilde: float = 1.0
    n_b: int = 1
    cutoff: int = 30

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if self.n_b < 1:
            raise ValueError("n_b must be at least 1")


def coherent_state(alpha: complex, cutoff: int | None = None) -> FockState:
    """Truncated, renormalized coherent state e^{-|a|^2/2} sum a^n/sqrt(n!) |n>.

    Raises if the truncated Poisson tail exceeds the tail budget, suggesting
    an adequate cutoff.
    """
    alpha = complex(alpha)
    if cutoff is None:
        cutoff = default_cutoff(alpha)
    if alpha == 0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return FockState(cutoff, amps)
    n = np.arange(cutoff + 1)
    log_mag = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag + 1j * n * np.angle(alpha))
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail > TAIL_TOL:
        raise ValueError(
            f"coherent-state tail {tail:.3e} above budget {TAIL_TOL:.0e} at cutoff {cutoff}; "
            f"use cutoff >= {default_cutoff(alpha)}"
        )
    return FockState(cutoff, amps / np.linalg.norm(amps))


def _mode_operators(cutoff: int):
    n = np.arange(cutoff + 1)
    lower = np.diag(np.sqrt(n[1:]).astype(complex), k=1)  # a |n> = sqrt(n) |n-1>
    return lower, lower.conj().T


def build_boson_hamiltonian(spec: BosonModelSpec) -> JointOperator:
    """H(infinity, N_B) on Fock(cutoff) x Dicke(N_B).

    w_A a^dag a + w_B (Jz_B + N_B/2) + (lam_tilde / sqrt(N_B)) (a Jb+ + a^dag Jb-).
    N_B = 1 is the Jaynes-Cummings limit; N_B > 1 Tavis-Cummings.
    """
    pb = CollectiveSpinParams(spec.n_b)
    a, adag = _mode_operators(spec.cutoff)
    num_mode = adag @ a
    jp_b = make_operator(pb, OperatorKind.JPLUS).dense()
    jm_b = make_operator(pb, OperatorKind.JMINUS).dense()
    num_b = make_operator(pb, OperatorKind.NUMBER).dense()
    id_mode = np.eye(spec.cutoff + 1, dtype=complex)
    id_b = np.eye(pb.dim, dtype=complex)
    coupling = spec.coupling_tilde / math.sqrt(spec.n_b)
    h = (
        spec.omega_a * np.kron(num_mode, id_b)
        + spec.omega_b * np.kron(id_mode, num_b)
        + coupling * (np.kron(a, jp_b) + np.kron(adag, jm_b))
    )
    return JointOperator(spec.cutoff + 1, pb.dim, h)


def _overlap_padded(x: np.ndarray, y: np.ndarray) -> complex:
    """<x|y> after zero-padding the shorter first axis (Dicke -> Fock embedding)."""
    rows = min(x.shape[0], y.shape[0])
    return complex(np.vdot(x[:rows], y[:rows]))


def compare_spin_to_boson(
    n_a_values,
    zeta: complex,
    coupling_tilde: float,
    t: float,
    n_b: int = 1,
    ancilla_amplitudes: np.ndarray | None = None,
    cutoff: int | None = None,
    omega_a: float = 0.0,
    omega_b: float = 0.0,
) -> np.ndarray:
    """Infidelity of the finite-spin model against the bosonic limit.

    For each N_A the spin model runs with lambda = lambda_tilde /
    sqrt(N_A N_B) from SCS(zeta / sqrt(N_A)) x ancilla, the boson model runs
    from coherent(zeta) x the same ancilla, and the Dicke index is embedded
    into the Fock basis.  Returns 1 - fidelity per N_A; the ancilla defaults
    to the all-down state.
    """
    pb = CollectiveSpinParams(n_b)
    if ancilla_amplitudes is None:
        anc = np.zeros(pb.dim, dtype=complex)
        anc[0] = 1.0
    else:
        anc = np.asarray(ancilla_amplitudes, dtype=complex)
        if anc.shape != (pb.dim,):
            raise ValueError(f"ancilla amplitudes must have length {pb.dim}")
        anc = anc / np.linalg.norm(anc)

    coh = coherent_state(zeta, cutoff)
    spec = BosonModelSpec(omega_a, omega_b, coupling_tilde, n_b, coh.cutoff)
    h_boson = build_boson_hamiltonian(spec)
    boson0 = np.outer(coh.amplitudes, anc)
    boson_t = propagate(h_boson, boson0, np.array([t]))[0].reshape(boson0.shape)

    from .dynamics import HamiltonianSpec, Picture, build_hamiltonian

    errors = []
    for n_a in n_a_values:
        pa = CollectiveSpinParams(int(n_a))
        lam = coupling_tilde / math.sqrt(pa.n_spins * n_b)
        h_spin = build_hamiltonian(
            pa, pb, HamiltonianSpec(omega_a, omega_b, lam, picture=Picture.LAB)
        )
        scs = spin_coherent_state(pa, zeta / math.sqrt(pa.n_spins))
        spin0 = np.outer(scs.amplitudes, anc)
        spin_t = propagate(h_spin, spin0, np.array([t]))[0].reshape(spin0.shape)
        errors.append(1.0 - abs(_overlap_padded(boson_t, spin_t)))
    return np.array(errors)
