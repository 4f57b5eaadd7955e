import numpy as np
import pytest
from scipy.linalg import expm

from spincat.dynamics import (
    HamiltonianSpec,
    NonConservingOperatorError,
    Picture,
    Trajectory,
    build_hamiltonian,
    evolve,
    excitation_blocks,
    total_excitation_operator,
)
from spincat.observables import expectation, fidelity
from spincat.spin import (
    CollectiveSpinParams,
    JointState,
    OperatorKind,
    make_operator,
    product_state,
    rotated_dicke,
    spin_coherent_state,
)


def random_joint_state(pa, pb, rng):
    amp = rng.normal(size=(pa.dim, pb.dim)) + 1j * rng.normal(size=(pa.dim, pb.dim))
    return JointState(pa, pb, amp / np.linalg.norm(amp))


def test_single_excitation_exchange_eigenvalues():
    pa = pb = CollectiveSpinParams(1)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    block = excitation_blocks(h)[1]
    assert block.nu == 1
    assert np.allclose(np.linalg.eigvalsh(block.block_matrix), [-1.0, 1.0])


def test_zero_coupling_interaction_picture_is_zero():
    pa, pb = CollectiveSpinParams(3), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(omega_a=2.0, omega_b=2.0, coupling=0.0))
    assert np.max(np.abs(h.matrix)) == 0.0


def test_hamiltonian_hermitian():
    pa, pb = CollectiveSpinParams(4), CollectiveSpinParams(2)
    for picture in (Picture.LAB, Picture.INTERACTION):
        h = build_hamiltonian(
            pa, pb, HamiltonianSpec(omega_a=1.3, omega_b=0.4, coupling=0.9, picture=picture)
        )
        assert np.max(np.abs(h.matrix - h.matrix.conj().T)) <= 1e-14


def test_lab_equals_interaction_plus_free_part():
    pa, pb = CollectiveSpinParams(3), CollectiveSpinParams(2)
    spec = HamiltonianSpec(omega_a=1.1, omega_b=0.7, coupling=0.6, picture=Picture.LAB)
    lab = build_hamiltonian(pa, pb, spec)
    inter = build_hamiltonian(
        pa, pb, HamiltonianSpec(omega_a=1.1, omega_b=0.7, coupling=0.6, picture=Picture.INTERACTION)
    )
    free = 0.7 * total_excitation_operator(pa, pb).matrix
    assert np.allclose(lab.matrix, inter.matrix + free)


def test_renormalized_coupling():
    pa, pb = CollectiveSpinParams(4), CollectiveSpinParams(1)
    bare = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    renorm = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0, renormalized=True))
    assert np.allclose(renorm.matrix, bare.matrix / 2)


def test_block_sizes_small():
    pa, pb = CollectiveSpinParams(2), CollectiveSpinParams(1)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    assert [len(b.indices) for b in excitation_blocks(h)] == [1, 2, 2, 1]


def test_block_sizes_wide():
    pa, pb = CollectiveSpinParams(80), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    blocks = excitation_blocks(h)
    assert len(blocks) == 83
    assert max(len(b.indices) for b in blocks) == 3


def test_blocks_partition_and_reassemble():
    pa, pb = CollectiveSpinParams(5), CollectiveSpinParams(3)
    h = build_hamiltonian(
        pa, pb, HamiltonianSpec(omega_a=0.9, omega_b=0.2, coupling=1.4, picture=Picture.LAB)
    )
    blocks = excitation_blocks(h)
    seen = set()
    rebuilt = np.zeros_like(h.matrix)
    for blk in blocks:
        for pair in blk.indices:
            assert pair[0] + pair[1] == blk.nu
            assert pair not in seen
            seen.add(pair)
        rows = [na * pb.dim + nb for na, nb in blk.indices]
        rebuilt[np.ix_(rows, rows)] = blk.block_matrix
    assert len(seen) == pa.dim * pb.dim
    assert np.array_equal(rebuilt, h.matrix)


def test_diagonal_hamiltonian_gives_diagonal_blocks():
    pa, pb = CollectiveSpinParams(3), CollectiveSpinParams(2)
    h = build_hamiltonian(
        pa, pb, HamiltonianSpec(omega_a=1.0, omega_b=0.5, coupling=0.0, picture=Picture.LAB)
    )
    for blk in excitation_blocks(h):
        assert np.allclose(blk.block_matrix, np.diag(np.diag(blk.block_matrix)))


def test_non_conserving_operator_rejected():
    from spincat.models import oat_hamiltonian

    h = oat_hamiltonian(CollectiveSpinParams(4), CollectiveSpinParams(2), 1.0)
    with pytest.raises(NonConservingOperatorError):
        excitation_blocks(h)


def test_evolve_identity_at_t0():
    pa, pb = CollectiveSpinParams(4), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=0.8))
    psi0 = random_joint_state(pa, pb, np.random.default_rng(1))
    traj = evolve(h, psi0, [0.0])
    assert np.allclose(traj.states[0].amplitudes, psi0.amplitudes)


def test_evolve_matches_dense_exponential():
    pa, pb = CollectiveSpinParams(4), CollectiveSpinParams(2)
    h = build_hamiltonian(
        pa, pb, HamiltonianSpec(omega_a=0.5, omega_b=0.2, coupling=1.0, picture=Picture.LAB)
    )
    psi0 = random_joint_state(pa, pb, np.random.default_rng(42))
    traj = evolve(h, psi0, [1.7])
    ref = expm(-1j * 1.7 * h.matrix) @ psi0.amplitudes.ravel()
    assert np.linalg.norm(traj.states[0].amplitudes.ravel() - ref) <= 1e-10


def test_evolve_oracle_sweep():
    rng = np.random.default_rng(7)
    for n_a in (1, 3, 6):
        for n_b in (1, 2, 3):
            pa, pb = CollectiveSpinParams(n_a), CollectiveSpinParams(n_b)
            h = build_hamiltonian(
                pa,
                pb,
                HamiltonianSpec(
                    omega_a=rng.uniform(-1, 1), omega_b=rng.uniform(-1, 1), coupling=rng.uniform(0.1, 2)
                ),
            )
            psi0 = random_joint_state(pa, pb, rng)
            t = rng.uniform(0.1, 4)
            traj = evolve(h, psi0, [t])
            ref = expm(-1j * t * h.matrix) @ psi0.amplitudes.ravel()
            assert np.linalg.norm(traj.states[0].amplitudes.ravel() - ref) <= 1e-10


def test_norm_and_excitation_conserved():
    pa, pb = CollectiveSpinParams(9), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    psi0 = product_state(spin_coherent_state(pa, 0.8), rotated_dicke(pb, 1.0, 0.0))
    times = np.linspace(0.2, 9.0, 25)
    traj = evolve(h, psi0, times)
    num = total_excitation_operator(pa, pb)
    ref = np.real(expectation(num, psi0))
    for st in traj.states:
        assert abs(st.norm() - 1) <= 1e-10
        assert abs(np.real(expectation(num, st)) - ref) <= 1e-10


def test_jsquared_conserved_on_both_sides():
    pa, pb = CollectiveSpinParams(6), CollectiveSpinParams(3)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.2))
    psi0 = product_state(spin_coherent_state(pa, 1.0), spin_coherent_state(pb, 1.0))
    traj = evolve(h, psi0, np.linspace(0.3, 5.0, 10))
    jsq_a = make_operator(pa, OperatorKind.JSQUARED)
    jsq_b = make_operator(pb, OperatorKind.JSQUARED)
    for st in traj.states:
        assert abs(np.real(expectation(jsq_a, st, subsystem="a")) - pa.j * (pa.j + 1)) < 1e-10
        assert abs(np.real(expectation(jsq_b, st, subsystem="b")) - pb.j * (pb.j + 1)) < 1e-10


def test_time_composability():
    pa, pb = CollectiveSpinParams(5), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=0.9))
    psi0 = random_joint_state(pa, pb, np.random.default_rng(3))
    s, t = 1.3, 2.1
    step1 = evolve(h, psi0, [s]).states[0]
    step2 = evolve(h, step1, [t]).states[0]
    direct = evolve(h, psi0, [s + t]).states[0]
    assert np.linalg.norm(step2.amplitudes - direct.amplitudes) <= 1e-10


def test_spectra_cached_between_calls():
    pa, pb = CollectiveSpinParams(4), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    psi0 = random_joint_state(pa, pb, np.random.default_rng(8))
    evolve(h, psi0, [0.5])
    spectra = h._spectra
    assert spectra is not None
    evolve(h, psi0, [1.5])
    assert h._spectra is spectra


def test_revival_peak_at_period():
    pa, pb = CollectiveSpinParams(80), CollectiveSpinParams(2)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    psi0 = product_state(spin_coherent_state(pa, 1.0), spin_coherent_state(pb, 1.0))
    period = 2 * np.pi * 80 / 2
    fid_at = lambda t: fidelity(psi0, evolve(h, psi0, [t]).states[0])
    assert fid_at(period) > 0.8
    assert fid_at(period) > fid_at(0.9 * period) + 0.3


def test_evolve_validates_inputs():
    pa, pb = CollectiveSpinParams(3), CollectiveSpinParams(1)
    h = build_hamiltonian(pa, pb, HamiltonianSpec(coupling=1.0))
    good = random_joint_state(pa, pb, np.random.default_rng(0))
    with pytest.raises(ValueError):
        evolve(h, JointState(pa, pb, good.amplitudes * 2), [1.0])
    with pytest.raises(ValueError):
        evolve(h, good, [np.inf])
    wrong = random_joint_state(CollectiveSpinParams(4), pb, np.random.default_rng(0))
    with pytest.raises(ValueError):
        evolve(h, wrong, [1.0])


def test_trajectory_requires_increasing_times():
    pa, pb = CollectiveSpinParams(2), CollectiveSpinParams(1)
    st = product_state(spin_coherent_state(pa, 0.3), spin_coherent_state(pb, 0.3))
    with pytest.raises(ValueError):
        Trajectory(np.array([1.0, 0.5]), [st, st])
