"""Analytic models for the exchange dynamics of a big spin with a small ancilla.

Three tiers of approximation, in order of appearance:

* a short-time factorized model in which system A stays a spin coherent
  state whose phase rotates at a rate set by the ancilla eigenvalue m
  (``gea_component`` / ``gea_superposition``);
* a one-axis-twisting Hamiltonian valid for |zeta| = 1 initial states
  (``oat_hamiltonian``);
* a closed-form quadratic-phase evolution whose fractional revivals are
  resolved into finite superpositions of spin coherent states by a
  generalized Gauss sum (``ansatz_evolve`` / ``gauss_dft`` /
  ``fractional_revival_state``).

``verify_q_transform`` checks the ladder-transform identity the models
rest on, by explicit matrix construction on small systems.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .dynamics import JointOperator
from .spin import (
    CollectiveSpinParams,
    DickeVector,
    JointState,
    OperatorKind,
    _log_sqrt_binom,
    make_operator,
    product_state,
    rotated_dicke,
    spin_coherent_state,
)

__all__ = [
    "ApproximationWarning",
    "Regime",
    "GeaComponentSpec",
    "GaussCatPrediction",
    "RevivalTimes",
    "gea_component",
    "gea_superposition",
    "validity_window",
    "revival_times",
    "oat_hamiltonian",
    "ansatz_evolve",
    "gauss_dft",
    "fractional_revival_state",
    "combined_to_joint",
    "verify_q_transform",
]


class ApproximationWarning(UserWarning):
    """Emitted when parameters leave the window an approximation was derived in."""


class Regime(Enum):
    BOSONIC_SMALL_ZETA = "bosonic_small_zeta"
    ZETA_ONE = "zeta_one"


@dataclass(frozen=True)
class GeaComponentSpec:
    """One factorized branch: ancilla eigenvalue m, initial SCS amplitude, coupling."""

    m: float
    zeta: complex
    coupling: float

    def check_regime(self, pa: CollectiveSpinParams, pb: CollectiveSpinParams) -> None:
        """Warn when |zeta| leaves [2 sqrt(N_B/N_A), sqrt(N_A/N_B)/2]."""
        az = abs(self.zeta)
        lo = 2 * math.sqrt(pb.n_spins / pa.n_spins)
        hi = math.sqrt(pa.n_spins / pb.n_spins) / 2
        if not lo <= az <= hi:
            warnings.warn(
                f"|zeta|={az:.4g} outside the factorization window [{lo:.4g}, {hi:.4g}] "
                f"for N_A={pa.n_spins}, N_B={pb.n_spins}",
                ApproximationWarning,
                stacklevel=3,
            )


def validity_window(
    regime: Regime,
    pa: CollectiveSpinParams,
    pb: CollectiveSpinParams,
    zeta: complex,
    coupling: float,
) -> float:
    """Upper bound on the dimensionless time lambda*t for the given regime.

    The strict inequalities are operationalized as one tenth of the binding
    bound.  Divide by the coupling for physical time.
    """
    az = abs(zeta)
    if regime is Regime.BOSONIC_SMALL_ZETA:
        with np.errstate(divide="ignore"):
            bound = min(2 * np.pi * az / pb.n_spins, 2 * np.pi / (pa.n_spins * az**3))
    elif regime is Regime.ZETA_ONE:
        bound = 2 * np.pi * math.sqrt(pa.n_spins) / pb.n_spins
    else:  # pragma: no cover - closed enum
        raise ValueError(f"unknown regime {regime!r}")
    return float(bound) / 10


class RevivalTimes(NamedTuple):
    revival: float
    cat: float


def revival_times(
    pa: CollectiveSpinParams,
    pb: CollectiveSpinParams,
    zeta: complex,
    coupling: float,
    regime: Regime,
) -> RevivalTimes:
    """Revival and cat-formation times for the two treated regimes.

    Small-|zeta| regime: revival 4 pi |zeta| / (lambda N_B).  |zeta| = 1
    regime: revival T = 2 pi N_A / (lambda N_B), strict period 4T when N_A
    is odd.  The cat time is a quarter of the revival either way.
    """
    if coupling <= 0:
        raise ValueError(f"coupling must be positive, got {coupling!r}")
    if regime is Regime.BOSONIC_SMALL_ZETA:
        revival = 4 * np.pi * abs(zeta) / (coupling * pb.n_spins)
    elif regime is Regime.ZETA_ONE:
        revival = 2 * np.pi * pa.n_spins / (coupling * pb.n_spins)
        if pa.n_spins % 2 == 1:
            revival *= 4
    else:  # pragma: no cover - closed enum
        raise ValueError(f"unknown regime {regime!r}")
    return RevivalTimes(float(revival), float(revival) / 4)


def gea_component(
    spec: GeaComponentSpec, pa: CollectiveSpinParams, pb: CollectiveSpinParams, t: float
) -> JointState:
    """Factorized branch state at time t.

    A stays a spin coherent state with rotating phase,
    e^{-i t lam m N_A |z|} |z e^{-i t lam m / |z|}>_A, while B carries the
    rotating-basis phases e^{-i t lam m (Jz_B + c) / |z|} on the rotated
    eigenvector it started in.
    """
    z = complex(spec.zeta)
    az = abs(z)
    if az == 0:
        raise ValueError("zeta = 0 makes the phase rate m/|zeta| singular")
    spec.check_regime(pa, pb)
    lam = float(spec.coupling)
    window = validity_window(Regime.BOSONIC_SMALL_ZETA, pa, pb, z, lam)
    if abs(lam * t) > window * (1 + 1e-12):
        warnings.warn(
            f"lambda*t = {lam * t:.4g} exceeds the validity window {window:.4g}",
            ApproximationWarning,
            stacklevel=2,
        )
    phi = -np.angle(z)
    a_state = spin_coherent_state(pa, z * np.exp(-1j * t * lam * spec.m / az))
    a_phase = np.exp(-1j * t * lam * spec.m * pa.n_spins * az)
    b0 = rotated_dicke(pb, spec.m, phi)
    jz_plus_c = np.arange(pb.dim) - pb.j + pb.c
    b_amps = np.exp(-1j * t * lam * spec.m * jz_plus_c / az) * b0.amplitudes
    return JointState(pa, pb, np.outer(a_phase * a_state.amplitudes, b_amps))


def gea_superposition(
    components, pa: CollectiveSpinParams, pb: CollectiveSpinParams, t: float
) -> JointState:
    """Normalized superposition of weighted factorized branches.

    ``components`` is a sequence of (weight, GeaComponentSpec).  The branches
    are not orthogonal in general, so the normalization comes from their
    exact Gram matrix.
    """
    components = list(components)
    if not components:
        raise ValueError("need at least one component")
    weights = np.array([complex(w) for w, _ in components])
    if np.all(weights == 0):
        raise ValueError("all superposition weights vanish")
    states = [gea_component(s, pa, pb, t) for _, s in components]
    vecs = [st.amplitudes.ravel() for st in states]
    gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    norm_sq = np.real(weights.conj() @ gram @ weights)
    if norm_sq <= 1e-24:
        raise ValueError("superposition cancels to the zero state")
    total = sum(w * st.amplitudes for w, st in zip(weights, states))
    return JointState(pa, pb, total / np.sqrt(norm_sq))


def oat_hamiltonian(
    pa: CollectiveSpinParams, pb: CollectiveSpinParams, coupling: float
) -> JointOperator:
    """One-axis-twisting approximation lam (2 sqrt(J_A^2) - (Jz_A)^2 / sqrt(J_A^2)) Jx_B.

    sqrt(J_A^2) is the scalar sqrt(j(j+1)) on the symmetric sector.  Intended
    for |zeta| = 1 initial states.
    """
    j = pa.j
    root_jsq = math.sqrt(j * (j + 1))
    na = np.arange(pa.dim)
    a_diag = coupling * (2 * root_jsq - (na - j) ** 2 / root_jsq)
    jx_b = make_operator(pb, OperatorKind.JX).dense()
    mat = np.kron(np.diag(a_diag.astype(complex)), jx_b)
    return JointOperator(pa.dim, pb.dim, mat)


def _combined_weights(pa: CollectiveSpinParams, pb: CollectiveSpinParams) -> np.ndarray:
    # w[n_a, n_b] = sqrt(C(N_A,n_a) C(N_B,n_b) / C(N_A+N_B, n_a+n_b))
    la = _log_sqrt_binom(pa.n_spins)
    lb = _log_sqrt_binom(pb.n_spins)
    lt = _log_sqrt_binom(pa.n_spins + pb.n_spins)
    na = np.arange(pa.dim)[:, None]
    nb = np.arange(pb.dim)[None, :]
    return np.exp(la[:, None] + lb[None, :] - lt[na + nb])


def combined_to_joint(
    pa: CollectiveSpinParams, pb: CollectiveSpinParams, combined: np.ndarray
) -> JointState:
    """Expand amplitudes over the combined (N_A + N_B)-spin Dicke basis into
    the (n_a, n_b) product basis of the symmetric sector."""
    combined = np.asarray(combined, dtype=complex)
    n_total = pa.n_spins + pb.n_spins
    if combined.shape != (n_total + 1,):
        raise ValueError(f"combined amplitudes must have length {n_total + 1}")
    na = np.arange(pa.dim)[:, None]
    nb = np.arange(pb.dim)[None, :]
    return JointState(pa, pb, _combined_weights(pa, pb) * combined[na + nb])


def ansatz_evolve(
    pa: CollectiveSpinParams,
    pb: CollectiveSpinParams,
    coupling: float,
    psi0_dicke_a_amplitudes: np.ndarray,
    t: float,
) -> JointState:
    """Closed-form quadratic-phase evolution of the zeta = 1 product state.

    The combined (N_A + N_B)-spin coherent-state amplitudes pick up phases
    exp[i t lam N_B (n - (N_A + N_B)/2)^2 / N_A]; this reproduces the exact
    Gauss-sum superpositions at rational fractions of the period
    T = 2 pi N_A / (lam N_B), the spin-flipped state at T/2, and the revival
    at T.  Only the zeta = 1 initial state is supported.
    """
    supplied = np.asarray(psi0_dicke_a_amplitudes, dtype=complex)
    reference = spin_coherent_state(pa, 1.0).amplitudes
    if supplied.shape != reference.shape or not np.allclose(supplied, reference, atol=1e-10):
        raise ValueError("closed-form evolution requires the zeta = 1 spin coherent state of A")
    n_total = pa.n_spins + pb.n_spins
    n = np.arange(n_total + 1)
    offsets = n - n_total / 2
    lam = float(coupling)
    phases = np.exp(1j * t * lam * pb.n_spins * offsets**2 / pa.n_spins)
    global_phase = np.exp(-1j * t * lam * pa.n_spins * pb.n_spins / 2)
    combined = np.exp(_log_sqrt_binom(n_total) - (n_total / 2) * np.log(2.0)) * phases
    return combined_to_joint(pa, pb, global_phase * combined)


@dataclass(frozen=True)
class GaussCatPrediction:
    """Fourier data of the fractional-revival superposition at t = p T / q."""

    p: int
    q: int
    fourier_weights: np.ndarray  # F_l, l = 0..q-1
    component_phases: np.ndarray  # e^{-2 pi i l / q}, the SCS amplitudes zeta_l
    extra_phases: np.ndarray  # e^{i pi l N_B / q}

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p={self.p} and q={self.q} must be coprime")
        total = np.sum(np.abs(self.fourier_weights) ** 2) / self.q
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"Fourier weights violate Parseval: sum |F_l|^2 / q = {total}")


def gauss_dft(p: int, q: int, n_a: int, n_b: int) -> GaussCatPrediction:
    """Generalized Gauss sum F_l = (1/sqrt(q)) sum_n exp[2 i p pi (n - N_A/2)^2 / q] e^{2 pi i l n / q}.

    Evaluated by direct q-term summation with integer modular reduction of
    the quadratic phases, so the result is exact for any N_A.  Also returns
    the component phases e^{-2 pi i l / q} and the assembly phases
    e^{i pi l N_B / q}.
    """
    if q < 1 or p < 1:
        raise ValueError("p and q must be positive integers")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} must be coprime")
    # (n - N_A/2)^2 = (2n - N_A)^2 / 4; reduce p (2n - N_A)^2 mod 4q exactly
    residues = np.array([(p * (2 * n - n_a) ** 2) % (4 * q) for n in range(q)])
    g = np.exp(2j * np.pi * residues / (4 * q))
    l = np.arange(q)
    weights = (g @ np.exp(2j * np.pi * np.outer(np.arange(q), l) / q)) / math.sqrt(q)
    component_phases = np.exp(-2j * np.pi * l / q)
    extra_phases = np.exp(1j * np.pi * l * n_b / q)
    return GaussCatPrediction(int(p), int(q), weights, component_phases, extra_phases)


def fractional_revival_state(
    pred: GaussCatPrediction, pa: CollectiveSpinParams, pb: CollectiveSpinParams
) -> JointState:
    """Assemble the predicted multi-component cat state at t = p T / q.

    Sum of (N_A + N_B)-spin coherent states F_l e^{i pi l N_B / q}
    [(|down> + e^{-2 pi i l / q} |up>)/sqrt(2)]^(N_A+N_B), normalized
    through the exact Gram matrix of the retained components.
    """
    keep = np.abs(pred.fourier_weights) > 1e-14
    if not np.any(keep):
        raise ValueError("all Fourier weights vanish; cannot assemble a state")
    weights = (pred.fourier_weights * pred.extra_phases)[keep]
    zetas = pred.component_phases[keep]
    comps = [
        product_state(spin_coherent_state(pa, z), spin_coherent_state(pb, z)).amplitudes.ravel()
        for z in zetas
    ]
    gram = np.array([[np.vdot(u, v) for v in comps] for u in comps])
    norm_sq = np.real(weights.conj() @ gram @ weights)
    if norm_sq <= 1e-24:
        raise ValueError("assembled superposition cancels to the zero state")
    total = sum(w * c for w, c in zip(weights, comps)) / np.sqrt(norm_sq)
    return JointState(pa, pb, total.reshape(pa.dim, pb.dim))


def _invsqrt_psd(mat: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Pseudo-inverse square root of a PSD matrix; eigenvalues below the
    floor are dropped instead of inverted."""
    w, v = np.linalg.eigh(mat)
    inv = np.where(w > floor, 1.0 / np.sqrt(np.clip(w, floor, None)), 0.0)
    return (v * inv) @ v.conj().T


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def verify_q_transform(pa: CollectiveSpinParams, pb: CollectiveSpinParams) -> float:
    """Max deviation in the ladder-transform identity on the interior subspace.

    Builds P = (J_A^- J_A^+)^{-1/2} J_A^- and the conditional shift
    Q = P^(Jz_B + c) as explicit matrices, and compares Q^{-1} sqrt(J^- J^+) Q
    against sqrt(J_A^2 - (Jz_A - Jz_B - c)(Jz_A - Jz_B - c + 1)) on the Dicke
    indices N_B/2 + c < n < N_A - N_B/2 - c where Q is unitary.
    """
    if pa.n_spins > 12 or pb.n_spins > 3:
        raise ValueError("explicit construction is intended for N_A <= 12, N_B <= 3")
    n_a, c = pa.n_spins, pb.c
    j = pa.j
    jm = make_operator(pa, OperatorKind.JMINUS).dense()
    jp = make_operator(pa, OperatorKind.JPLUS).dense()
    jmjp = jm @ jp
    p_op = _invsqrt_psd(jmjp) @ jm
    sqrt_jmjp = _sqrt_psd(jmjp)

    n = np.arange(pa.dim)
    interior = (n > pb.n_spins / 2 + c) & (n < n_a - pb.n_spins / 2 - c)
    idx = np.nonzero(interior)[0]
    mu = n - j

    worst = 0.0
    for nb in range(pb.dim):
        m_z = nb - pb.j
        k = int(round(m_z + c))
        if k >= 0:
            shift = np.linalg.matrix_power(p_op, k)
        else:
            shift = np.linalg.matrix_power(p_op.conj().T, -k)
        lhs = shift.conj().T @ sqrt_jmjp @ shift
        rhs_diag = np.sqrt(np.clip(j * (j + 1) - (mu - k) * (mu - k + 1), 0.0, None))
        rhs = np.diag(rhs_diag.astype(complex))
        dev = np.max(np.abs(lhs[np.ix_(idx, idx)] - rhs[np.ix_(idx, idx)]))
        worst = max(worst, float(dev))
    return worst
