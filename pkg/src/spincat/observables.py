"""Measurement layer: expectations, variances, spin squeezing, Q-functions, fidelity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import JointOperator
from .spin import (
    CollectiveOperator,
    CollectiveSpinParams,
    DickeVector,
    JointState,
    OperatorKind,
    inner_product,
    make_operator,
)

__all__ = [
    "SqueezingResult",
    "QFunctionField",
    "expectation",
    "variance",
    "squeezing_kitagawa_ueda",
    "q_function",
    "fidelity",
]

_HERMITIAN_KINDS = frozenset(
    {OperatorKind.JX, OperatorKind.JY, OperatorKind.JZ, OperatorKind.JSQUARED, OperatorKind.NUMBER}
)


def _apply(op, psi, subsystem=None) -> np.ndarray:
    """Apply an operator to a state, returning raw amplitudes of the same shape."""
    if isinstance(op, CollectiveOperator) and isinstance(psi, DickeVector):
        if op.params != psi.params:
            raise ValueError("operator and state sizes differ")
        return op.matrix @ psi.amplitudes
    if isinstance(op, JointOperator) and isinstance(psi, JointState):
        if (psi.params_a.dim, psi.params_b.dim) != (op.dim_a, op.dim_b):
            raise ValueError("operator and state dimensions differ")
        return (op.matrix @ psi.amplitudes.ravel()).reshape(psi.amplitudes.shape)
    if isinstance(op, CollectiveOperator) and isinstance(psi, JointState):
        if subsystem == "a":
            if op.params != psi.params_a:
                raise ValueError("operator does not match subsystem A")
            return op.matrix @ psi.amplitudes
        if subsystem == "b":
            if op.params != psi.params_b:
                raise ValueError("operator does not match subsystem B")
            return (op.matrix @ psi.amplitudes.T).T
        raise ValueError("a collective operator on a joint state needs subsystem='a' or 'b'")
    raise ValueError(f"cannot apply {type(op).__name__} to {type(psi).__name__}")


def expectation(op, psi, subsystem=None) -> complex:
    """<psi|O|psi>.  For a collective operator acting on one side of a joint
    state, pass subsystem='a' or 'b'."""
    applied = _apply(op, psi, subsystem)
    return complex(np.vdot(psi.amplitudes, applied))


def variance(op, psi, subsystem=None) -> float:
    """<O^2> - <O>^2 for a Hermitian operator; tiny negatives are clamped to 0."""
    applied = _apply(op, psi, subsystem)
    second = float(np.real(np.vdot(applied, applied)))
    mean = np.vdot(psi.amplitudes, applied)
    var = second - abs(mean) ** 2
    if var < -1e-12:
        raise ValueError(f"variance came out {var}; operator is not Hermitian on this state")
    return max(var, 0.0)


@dataclass(frozen=True)
class SqueezingResult:
    """Kitagawa-Ueda squeezing: chi^2 = 4 min Var(J along n_perp) / N."""

    chi_squared: float
    mean_direction: np.ndarray
    min_perp_direction: np.ndarray


def _spin_applied(psi: JointState, subsystem: str):
    params = psi.params_a if subsystem == "a" else psi.params_b
    ops = [make_operator(params, k) for k in (OperatorKind.JX, OperatorKind.JY, OperatorKind.JZ)]
    return params, [_apply(op, psi, subsystem) for op in ops]


def squeezing_kitagawa_ueda(psi: JointState, subsystem: str = "a") -> SqueezingResult:
    """Spin squeezing of one subsystem of a joint pure state.

    The minimization over directions perpendicular to the mean spin is done
    in closed form: the 2x2 covariance matrix of the two perpendicular spin
    components has smaller eigenvalue
    (C11 + C22 - sqrt((C11 - C22)^2 + 4 C12^2)) / 2.
    """
    params, (vx, vy, vz) = _spin_applied(psi, subsystem)
    flat = psi.amplitudes
    mean = np.array([np.real(np.vdot(flat, v)) for v in (vx, vy, vz)])
    length = np.linalg.norm(mean)
    if length < 1e-12:
        raise ValueError("mean spin vector vanishes; squeezing direction undefined")
    n = mean / length
    ref = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(n, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)

    w1 = e1[0] * vx + e1[1] * vy + e1[2] * vz
    w2 = e2[0] * vx + e2[1] * vy + e2[2] * vz
    m1 = np.real(np.vdot(flat, w1))
    m2 = np.real(np.vdot(flat, w2))
    c11 = np.real(np.vdot(w1, w1)) - m1 * m1
    c22 = np.real(np.vdot(w2, w2)) - m2 * m2
    c12 = np.real(np.vdot(w1, w2)) - m1 * m2

    disc = np.sqrt((c11 - c22) ** 2 + 4 * c12**2)
    min_var = max((c11 + c22 - disc) / 2, 0.0)

    alpha = 0.5 * np.arctan2(2 * c12, c11 - c22)
    candidates = [alpha, alpha + np.pi / 2]
    values = [
        c11 * np.cos(a) ** 2 + c22 * np.sin(a) ** 2 + 2 * c12 * np.sin(a) * np.cos(a)
        for a in candidates
    ]
    best = candidates[int(np.argmin(values))]
    direction = np.cos(best) * e1 + np.sin(best) * e2

    chi2 = 4 * min_var / params.n_spins
    return SqueezingResult(float(chi2), n, direction)


@dataclass(frozen=True)
class QFunctionField:
    """|<psi|zeta>| sampled over the Bloch sphere, zeta = e^{-i phi} tan(theta/2)."""

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray


def _angle_profile(params: CollectiveSpinParams, theta: float) -> np.ndarray:
    # real magnitudes sqrt(C(N,n)) sin^n(theta/2) cos^(N-n)(theta/2)
    from .spin import _log_sqrt_binom

    n = np.arange(params.dim)
    half = 0.5 * theta
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = (
            _log_sqrt_binom(params.n_spins)
            + n * np.log(np.sin(half))
            + (params.n_spins - n) * np.log(np.cos(half))
        )
    prof = np.exp(log_mag)
    prof[np.isnan(prof)] = 0.0
    nrm = np.linalg.norm(prof)
    if nrm == 0:
        prof = np.zeros(params.dim)
        prof[0] = 1.0
        return prof
    return prof / nrm


def q_function(psi: JointState, n_theta: int = 181, n_phi: int = 360) -> QFunctionField:
    """Husimi-style Q = |<psi|zeta>_{AB}| on an (n_theta x n_phi) angular grid.

    The probe is the product spin coherent state SCS(zeta)_A x SCS(zeta)_B,
    which is the symmetric (N_A + N_B)-spin coherent state.  The theta = pi
    pole is the all-up product state.
    """
    if n_theta < 2 or n_phi < 1:
        raise ValueError("grid needs n_theta >= 2 and n_phi >= 1")
    if abs(psi.norm() - 1.0) > 1e-10:
        raise ValueError("q_function expects a unit-norm state")
    pa, pb = psi.params_a, psi.params_b
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    n_total = pa.n_spins + pb.n_spins
    # probe amplitude at (n_a, n_b) carries e^{-i phi (n_a + n_b)}; group by
    # total excitation so each theta row is a single small mat-vec
    phase_table = np.exp(-1j * np.outer(np.arange(n_total + 1), phis))
    conj_amps = np.conj(psi.amplitudes)
    values = np.empty((n_theta, n_phi))
    for it, theta in enumerate(thetas):
        ra = _angle_profile(pa, theta)
        rb = _angle_profile(pb, theta)
        k = conj_amps * np.outer(ra, rb)
        g = np.zeros(n_total + 1, dtype=complex)
        for nb in range(pb.dim):
            g[nb : nb + pa.dim] += k[:, nb]
        values[it] = np.abs(g @ phase_table)
    return QFunctionField(thetas, phis, values)


def fidelity(x, y) -> float:
    """|<x|y>|, insensitive to global phase."""
    return abs(inner_product(x, y))
