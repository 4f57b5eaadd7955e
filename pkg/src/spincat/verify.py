"""Self-check suite behind ``spincat verify``: invariants and cross-oracle
comparisons, each reported as a pass/fail row."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.linalg import expm

from .boson import BosonModelSpec, build_boson_hamiltonian, coherent_state
from .dynamics import HamiltonianSpec, Picture, build_hamiltonian, evolve, excitation_blocks, propagate
from .models import (
    GeaComponentSpec,
    Regime,
    ansatz_evolve,
    fractional_revival_state,
    gauss_dft,
    gea_component,
    gea_superposition,
    validity_window,
    verify_q_transform,
)
from .observables import expectation, fidelity, squeezing_kitagawa_ueda, variance
from .spin import (
    CollectiveSpinParams,
    OperatorKind,
    make_operator,
    product_state,
    rotated_dicke,
    spin_coherent_state,
)

__all__ = ["run_all_checks"]


def _check_commutators():
    worst = 0.0
    for n in (1, 2, 7, 40, 100):
        p = CollectiveSpinParams(n)
        jx, jy, jz = (
            make_operator(p, k).dense() for k in (OperatorKind.JX, OperatorKind.JY, OperatorKind.JZ)
        )
        num = make_operator(p, OperatorKind.NUMBER).dense()
        jp, jm = make_operator(p, OperatorKind.JPLUS).dense(), make_operator(p, OperatorKind.JMINUS).dense()
        worst = max(worst, np.max(np.abs(jx @ jy - jy @ jx - 1j * jz)))
        worst = max(worst, np.max(np.abs((jm @ jp - jp @ jm) / n - np.eye(n + 1) + (2 / n) * num)))
    return worst <= 1e-12, f"max deviation {worst:.2e} (tol 1e-12)"


def _check_scs_norms():
    worst = 0.0
    for n in (1, 2, 80):
        p = CollectiveSpinParams(n)
        for az in (0.1, 1.0, 10.0):
            worst = max(worst, abs(spin_coherent_state(p, az * np.exp(0.3j)).norm() - 1.0))
    return worst <= 1e-12, f"max |norm-1| {worst:.2e} (tol 1e-12)"


def _check_rotated_dicke():
    worst = 0.0
    for n in (1, 2, 9, 31):
        p = CollectiveSpinParams(n)
        jx = make_operator(p, OperatorKind.JX).dense()
        jz = make_operator(p, OperatorKind.JZ).dense()
        phi = 0.67
        rot = expm(-1j * phi * jz) @ jx @ expm(1j * phi * jz)
        for m in np.arange(-n / 2, n / 2 + 1):
            v = rotated_dicke(p, m, phi).amplitudes
            worst = max(worst, np.linalg.norm(rot @ v - m * v))
    return worst <= 1e-10, f"max eigen-residual {worst:.2e} (tol 1e-10)"


def _check_block_oracle():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(8):
        pa = CollectiveSpinParams(int(rng.integers(1, 7)))
        pb = CollectiveSpinParams(int(rng.integers(1, 4)))
        spec = HamiltonianSpec(
            omega_a=rng.uniform(-1, 1),
            omega_b=rng.uniform(-1, 1),
            coupling=rng.uniform(0.2, 2),
            picture=Picture.LAB if rng.random() < 0.5 else Picture.INTERACTION,
        )
        h = build_hamiltonian(pa, pb, spec)
        amp = rng.normal(size=(pa.dim, pb.dim)) + 1j * rng.normal(size=(pa.dim, pb.dim))
        amp /= np.linalg.norm(amp)
        t = rng.uniform(0, 5)
        got = propagate(h, amp, np.array([t]))[0]
        ref = expm(-1j * t * h.matrix) @ amp.ravel()
        worst = max(worst, np.linalg.norm(got - ref))
    return worst <= 1e-10, f"max |block - expm| {worst:.2e} (tol 1e-10)"


def _check_q_transform():
    worst = max(
        verify_q_transform(CollectiveSpinParams(6), CollectiveSpinParams(1)),
        verify_q_transform(CollectiveSpinParams(8), CollectiveSpinParams(2)),
        verify_q_transform(CollectiveSpinParams(12), CollectiveSpinParams(3)),
    )
    return worst <= 1e-10, f"max identity deviation {worst:.2e} (tol 1e-10)"


def _check_gauss():
    worst_parseval = 0.0
    for p, q in ((1, 3), (1, 4), (2, 5), (3, 8), (5, 12)):
        pred = gauss_dft(p, q, 80, 2)
        worst_parseval = max(worst_parseval, abs(np.sum(np.abs(pred.fourier_weights) ** 2) - q))
    pa, pb = CollectiveSpinParams(80), CollectiveSpinParams(2)
    scs = spin_coherent_state(pa, 1.0)
    T = 2 * np.pi * 80 / 2
    worst_fid = 1.0
    for p, q in ((1, 2), (1, 3), (1, 4), (2, 3)):
        frs = fractional_revival_state(gauss_dft(p, q, 80, 2), pa, pb)
        anz = ansatz_evolve(pa, pb, 1.0, scs.amplitudes, p * T / q)
        worst_fid = min(worst_fid, fidelity(frs, anz))
    ok = worst_parseval <= 1e-12 and (1 - worst_fid) <= 1e-10
    return ok, f"Parseval dev {worst_parseval:.2e}; min DFT-vs-ansatz fidelity {worst_fid:.12f}"


def _check_ansatz_periodicity():
    pa, pb = CollectiveSpinParams(80), CollectiveSpinParams(2)
    scs = spin_coherent_state(pa, 1.0)
    T = 2 * np.pi * 80 / 2
    worst = max(
        1 - fidelity(ansatz_evolve(pa, pb, 1.0, scs.amplitudes, t), ansatz_evolve(pa, pb, 1.0, scs.amplitudes, t + T))
        for t in (0.0, 13.7, T / 3)
    )
    return worst <= 1e-12, f"max 1-fidelity over period {worst:.2e} (tol 1e-12)"


def _check_attractor():
    pa = CollectiveSpinParams(60)
    worst = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for nb in (1, 2, 3):
            pb = CollectiveSpinParams(nb)
            zeta, lam = 0.5 * np.exp(0.4j), 1.0
            tcat = np.pi * abs(zeta) / (lam * nb)
            plus = gea_component(GeaComponentSpec(+nb / 2, zeta, lam), pa, pb, tcat)
            minus = gea_component(GeaComponentSpec(-nb / 2, zeta, lam), pa, pb, tcat)
            bp = plus.amplitudes[np.argmax(np.abs(plus.amplitudes).sum(axis=1))]
            bm = minus.amplitudes[np.argmax(np.abs(minus.amplitudes).sum(axis=1))]
            overlap = abs(np.vdot(bp, bm)) / (np.linalg.norm(bp) * np.linalg.norm(bm))
            worst = min(worst, overlap)
    return (1 - worst) <= 1e-12, f"min B-factor overlap {worst:.12f} (tol 1e-12)"


def _check_revival():
    pa, pb = CollectiveSpinParams(80), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    psi0 = product_state(spin_coherent_state(pa, 1.0), spin_coherent_state(pb, 1.0))
    T = 2 * np.pi * 80 / 2
    ts = np.linspace(0.95 * T, 1.05 * T, 101)
    fids = np.array([fidelity(psi0, st) for st in evolve(h, psi0, ts).states])
    k = int(np.argmax(fids))
    edges = [fidelity(psi0, st) for st in evolve(h, psi0, [0.9 * T, 1.1 * T]).states]
    ok = abs(ts[k] - T) <= 0.02 * T and fids[k] > max(edges)
    return ok, f"peak {fids[k]:.4f} at {(ts[k] - T) / T * 100:+.2f}% of T (edges {edges[0]:.3f}, {edges[1]:.3f})"


def _check_squeezing():
    pa = CollectiveSpinParams(80)
    mins = {}
    for nb in (1, 2):
        pb = CollectiveSpinParams(nb)
        h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
        psi0 = product_state(spin_coherent_state(pa, 1.0), spin_coherent_state(pb, 1.0))
        ts = np.linspace(1e-3, 12.0 / nb, 240)
        chi = [squeezing_kitagawa_ueda(st, "a").chi_squared for st in evolve(h, psi0, ts).states]
        k = int(np.argmin(chi))
        mins[nb] = (ts[k], chi[k])
    ratio = mins[2][0] / mins[1][0]
    ok = mins[1][1] < 1 and mins[2][1] < 1 and abs(ratio - 0.5) <= 0.1
    return ok, f"min chi2 {mins[1][1]:.3f}/{mins[2][1]:.3f}; speedup ratio {ratio:.3f} (expect 0.5)"


def _check_gea_window():
    pa, pb = CollectiveSpinParams(200), CollectiveSpinParams(1)
    zeta, lam = 2.0, 1.0
    bound = validity_window(Regime.BOSONIC_SMALL_ZETA, pa, pb, zeta, lam)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=lam))
    comps = [(1.0, GeaComponentSpec(0.5, zeta, lam)), (1.0, GeaComponentSpec(-0.5, zeta, lam))]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        psi0 = gea_superposition(comps, pa, pb, 0.0)
        ts = bound * np.array([0.5, 1.0])
        exact = evolve(h, psi0, ts).states
        approx = [gea_superposition(comps, pa, pb, t) for t in ts]
    worst = min(fidelity(e, a) for e, a in zip(exact, approx))
    return worst >= 0.99, f"min fidelity {worst:.6f} up to bound lambda*t = {bound:.3e} (gate 0.99)"


def _check_boson():
    spec = BosonModelSpec(coupling_tilde=0.8, n_b=1, cutoff=12)
    h = build_boson_hamiltonian(spec)
    blocks = excitation_blocks(h)
    eigs = np.linalg.eigvalsh(blocks[1].block_matrix)
    dev = np.max(np.abs(np.sort(eigs) - np.array([-0.8, 0.8])))
    coh = coherent_state(1.0, 20)
    tail = abs(1 - np.sum(np.abs(coh.amplitudes) ** 2))
    ok = dev <= 1e-12 and tail <= 1e-12
    return ok, f"JC nu=1 eigenvalue dev {dev:.2e}; coherent tail {tail:.2e}"


def _check_conservation():
    pa, pb = CollectiveSpinParams(9), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(omega_a=0.4, omega_b=0.1, coupling=1.1, picture=Picture.LAB))
    psi0 = product_state(spin_coherent_state(pa, 0.7), rotated_dicke(pb, 1.0, 0.3))
    traj = evolve(h, psi0, np.linspace(0.1, 7, 40))
    from .dynamics import total_excitation_operator

    num = total_excitation_operator(pa, pb)
    vals = [np.real(expectation(num, st)) for st in traj.states]
    drift = max(abs(v - vals[0]) for v in vals)
    norms = max(abs(st.norm() - 1) for st in traj.states)
    ok = drift <= 1e-10 and norms <= 1e-10
    return ok, f"excitation drift {drift:.2e}; worst |norm-1| {norms:.2e} (tol 1e-10)"


CHECKS = [
    ("operator commutators (exact + finite-N)", _check_commutators),
    ("spin coherent state norms", _check_scs_norms),
    ("rotated Dicke eigenvectors", _check_rotated_dicke),
    ("block propagation vs dense expm", _check_block_oracle),
    ("ladder-transform identity", _check_q_transform),
    ("Gauss sums: Parseval + DFT vs ansatz", _check_gauss),
    ("ansatz periodicity", _check_ansatz_periodicity),
    ("attractor state coincidence", _check_attractor),
    ("revival peak near T (N_A=80, N_B=2)", _check_revival),
    ("squeezing dip and 1/N_B speedup", _check_squeezing),
    ("short-time factorized model vs exact", _check_gea_window),
    ("bosonic limit: JC block + coherent tail", _check_boson),
    ("norm and excitation conservation", _check_conservation),
]


def run_all_checks(printer=print) -> bool:
    """Run every check, print one pass/fail row each, return overall success."""
    all_ok = True
    width = max(len(name) for name, _ in CHECKS)
    for name, fn in CHECKS:
        ok, detail = fn()
        all_ok &= ok
        printer(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    printer(f"{'all checks passed' if all_ok else 'SOME CHECKS FAILED'}")
    return all_ok
