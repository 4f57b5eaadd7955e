import numpy as np
import pytest
from scipy.linalg import expm

from spincat.spin import (
    CollectiveSpinParams,
    OperatorKind,
    dicke_basis_state,
    inner_product,
    make_operator,
    product_state,
    rotated_dicke,
    scs_overlap,
    spin_coherent_state,
    spin_coherent_state_angles,
)

SQ2 = np.sqrt(2)


def test_params_bookkeeping():
    p = CollectiveSpinParams(5)
    assert p.dim == 6
    assert p.j == 2.5
    assert p.c == 0.5
    assert CollectiveSpinParams(4).c == 0.0


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_params_rejects_bad_counts(bad):
    with pytest.raises(ValueError):
        CollectiveSpinParams(bad)


def test_jplus_raises_ladder():
    p = CollectiveSpinParams(2)
    jp = make_operator(p, OperatorKind.JPLUS)
    out = jp.apply(dicke_basis_state(p, 0))
    assert np.allclose(out, [0, SQ2, 0])


def test_ladder_annihilates_at_edges():
    p = CollectiveSpinParams(2)
    jp = make_operator(p, OperatorKind.JPLUS)
    jm = make_operator(p, OperatorKind.JMINUS)
    assert np.allclose(jp.apply(dicke_basis_state(p, 2)), 0)
    assert np.allclose(jm.apply(dicke_basis_state(p, 0)), 0)


def test_make_operator_rejects_non_enum():
    with pytest.raises(TypeError):
        make_operator(CollectiveSpinParams(2), "jx")


@pytest.mark.parametrize("n_spins", [1, 2, 7, 40, 100])
def test_commutators(n_spins):
    p = CollectiveSpinParams(n_spins)
    jx, jy, jz = (
        make_operator(p, k).dense() for k in (OperatorKind.JX, OperatorKind.JY, OperatorKind.JZ)
    )
    assert np.max(np.abs(jx @ jy - jy @ jx - 1j * jz)) <= 1e-12 * max(1, n_spins)
    assert np.max(np.abs(jy @ jz - jz @ jy - 1j * jx)) <= 1e-12 * max(1, n_spins)
    assert np.max(np.abs(jz @ jx - jx @ jz - 1j * jy)) <= 1e-12 * max(1, n_spins)


@pytest.mark.parametrize("n_spins", [1, 2, 9, 64])
def test_finite_size_commutator_correction(n_spins):
    # [J-/sqrt(N), J+/sqrt(N)] = 1 - (2/N)(Jz + N/2)
    p = CollectiveSpinParams(n_spins)
    jp = make_operator(p, OperatorKind.JPLUS).dense()
    jm = make_operator(p, OperatorKind.JMINUS).dense()
    num = make_operator(p, OperatorKind.NUMBER).dense()
    lhs = (jm @ jp - jp @ jm) / n_spins
    rhs = np.eye(p.dim) - (2 / n_spins) * num
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


@pytest.mark.parametrize("n_spins", [1, 3, 12])
def test_hermiticity_and_adjoints(n_spins):
    p = CollectiveSpinParams(n_spins)
    for kind in (
        OperatorKind.JX,
        OperatorKind.JY,
        OperatorKind.JZ,
        OperatorKind.JSQUARED,
        OperatorKind.NUMBER,
    ):
        m = make_operator(p, kind).dense()
        assert np.allclose(m, m.conj().T)
    jp = make_operator(p, OperatorKind.JPLUS).dense()
    jm = make_operator(p, OperatorKind.JMINUS).dense()
    assert np.allclose(jp, jm.conj().T)


def test_jsquared_and_number_identities():
    p = CollectiveSpinParams(7)
    j = p.j
    jsq = make_operator(p, OperatorKind.JSQUARED).dense()
    assert np.allclose(jsq, j * (j + 1) * np.eye(p.dim))
    num = make_operator(p, OperatorKind.NUMBER).dense()
    jz = make_operator(p, OperatorKind.JZ).dense()
    assert np.allclose(num, jz + (p.n_spins / 2) * np.eye(p.dim))
    # J^2 from components matches the scalar on this sector
    jx, jy = make_operator(p, OperatorKind.JX).dense(), make_operator(p, OperatorKind.JY).dense()
    assert np.allclose(jx @ jx + jy @ jy + jz @ jz, jsq)


def test_scs_trivial_and_binomial():
    p = CollectiveSpinParams(2)
    assert np.allclose(spin_coherent_state(p, 0).amplitudes, [1, 0, 0])
    assert np.allclose(spin_coherent_state(p, 1).amplitudes, [0.5, SQ2 / 2, 0.5])


def test_scs_mean_excitation_at_unit_zeta():
    p = CollectiveSpinParams(80)
    scs = spin_coherent_state(p, 1.0)
    num = make_operator(p, OperatorKind.NUMBER)
    mean = np.vdot(scs.amplitudes, num.apply(scs))
    assert abs(mean - 40) < 1e-10


@pytest.mark.parametrize("n_spins", [1, 2, 80])
@pytest.mark.parametrize("mod", [0.1, 1.0, 10.0])
def test_scs_norm(n_spins, mod):
    scs = spin_coherent_state(CollectiveSpinParams(n_spins), mod * np.exp(0.7j))
    assert abs(scs.norm() - 1.0) <= 1e-12


@pytest.mark.parametrize("bad", [np.inf, np.nan, complex(np.inf, 1)])
def test_scs_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        spin_coherent_state(CollectiveSpinParams(3), bad)


def test_scs_overlap_closed_form():
    rng = np.random.default_rng(5)
    for n_spins in (2, 9, 80):
        p = CollectiveSpinParams(n_spins)
        for _ in range(5):
            z = rng.normal() + 1j * rng.normal()
            e = rng.normal() + 1j * rng.normal()
            got = inner_product(spin_coherent_state(p, z), spin_coherent_state(p, e))
            assert abs(got - scs_overlap(n_spins, z, e)) < 1e-12


def test_antipodal_scs_orthogonal_n2():
    p = CollectiveSpinParams(2)
    got = inner_product(spin_coherent_state(p, 1.0), spin_coherent_state(p, -1.0))
    assert abs(got) < 1e-14


def test_rotated_dicke_two_level():
    p = CollectiveSpinParams(1)
    plus = rotated_dicke(p, 0.5, 0.0)
    assert np.allclose(plus.amplitudes, [1 / SQ2, 1 / SQ2])
    minus = rotated_dicke(p, -0.5, 0.0)
    # (|up> - |down>)/sqrt(2) up to global phase
    assert abs(abs(np.vdot(minus.amplitudes, np.array([-1, 1]) / SQ2)) - 1) < 1e-12


def test_rotated_dicke_phase_convention_matches_two_level_forms():
    # e^{-i phi Jz} |D_m^0> = (e^{i phi/2}|down> + e^{-i phi/2}|up>)/sqrt(2) for m=+1/2
    p = CollectiveSpinParams(1)
    phi = 1.234
    got = rotated_dicke(p, 0.5, phi).amplitudes
    want = np.array([np.exp(1j * phi / 2), np.exp(-1j * phi / 2)]) / SQ2
    assert np.allclose(got, want)
    got = rotated_dicke(p, -0.5, phi).amplitudes
    want = np.array([-np.exp(1j * phi / 2), np.exp(-1j * phi / 2)]) / SQ2
    assert np.allclose(got, want)


def test_rotated_dicke_is_jx_eigenvector_n2():
    p = CollectiveSpinParams(2)
    jx = make_operator(p, OperatorKind.JX).dense()
    v = rotated_dicke(p, 1.0, 0.0).amplitudes
    assert np.linalg.norm(jx @ v - 1.0 * v) <= 1e-10


@pytest.mark.parametrize("n_spins", [1, 2, 5, 28])
def test_rotated_dicke_eigen_residual(n_spins):
    p = CollectiveSpinParams(n_spins)
    jx = make_operator(p, OperatorKind.JX).dense()
    jz = make_operator(p, OperatorKind.JZ).dense()
    rng = np.random.default_rng(n_spins)
    phi = rng.uniform(0, 2 * np.pi)
    rotated_jx = expm(-1j * phi * jz) @ jx @ expm(1j * phi * jz)
    for m in np.arange(-p.j, p.j + 1):
        v = rotated_dicke(p, m, phi).amplitudes
        assert np.linalg.norm(rotated_jx @ v - m * v) <= 1e-10
        assert abs(np.linalg.norm(v) - 1) <= 1e-12


def test_rotated_dicke_rejects_bad_labels():
    p = CollectiveSpinParams(2)
    with pytest.raises(ValueError):
        rotated_dicke(p, 0.5, 0.0)  # half-integer m needs odd N
    with pytest.raises(ValueError):
        rotated_dicke(p, 2.0, 0.0)  # outside the ladder


def test_rotated_dicke_top_rung_is_scs():
    p = CollectiveSpinParams(6)
    top = rotated_dicke(p, 3.0, 0.0)
    assert abs(abs(inner_product(top, spin_coherent_state(p, 1.0))) - 1) < 1e-12


def test_product_state_basics():
    pa, pb = CollectiveSpinParams(2), CollectiveSpinParams(1)
    joint = product_state(dicke_basis_state(pa, 0), dicke_basis_state(pb, 0))
    want = np.zeros((3, 2))
    want[0, 0] = 1
    assert np.allclose(joint.amplitudes, want)


def test_product_norm_multiplicative():
    rng = np.random.default_rng(9)
    pa, pb = CollectiveSpinParams(4), CollectiveSpinParams(3)
    for _ in range(5):
        a = rng.normal(size=pa.dim) + 1j * rng.normal(size=pa.dim)
        b = rng.normal(size=pb.dim) + 1j * rng.normal(size=pb.dim)
        from spincat.spin import DickeVector

        da = DickeVector(pa, a / np.linalg.norm(a))
        db = DickeVector(pb, b / np.linalg.norm(b))
        assert abs(product_state(da, db).norm() - 1) <= 1e-12


def test_product_of_equal_scs_is_combined_scs():
    # product of zeta-SCSs is the (N_A + N_B)-spin SCS in the product basis
    pa, pb = CollectiveSpinParams(5), CollectiveSpinParams(3)
    z = 0.6 * np.exp(0.8j)
    joint = product_state(spin_coherent_state(pa, z), spin_coherent_state(pb, z))
    from spincat.models import combined_to_joint

    combined = spin_coherent_state(CollectiveSpinParams(8), z).amplitudes
    assert np.allclose(joint.amplitudes, combined_to_joint(pa, pb, combined).amplitudes)


def test_inner_product_conjugate_linearity_and_errors():
    p = CollectiveSpinParams(3)
    x = spin_coherent_state(p, 0.5j)
    assert abs(inner_product(x, x) - 1) < 1e-12
    assert inner_product(dicke_basis_state(p, 0), dicke_basis_state(p, 1)) == 0
    from spincat.spin import DickeVector

    scaled = DickeVector(p, 1j * x.amplitudes)
    assert abs(inner_product(scaled, x) - (-1j) * inner_product(x, x)) < 1e-12
    with pytest.raises(ValueError):
        inner_product(x, spin_coherent_state(CollectiveSpinParams(4), 0.5))


def test_angle_parameterization_matches_zeta_form():
    p = CollectiveSpinParams(11)
    rng = np.random.default_rng(2)
    for _ in range(5):
        theta = rng.uniform(0.05, np.pi - 0.05)
        phi = rng.uniform(0, 2 * np.pi)
        zeta = np.exp(-1j * phi) * np.tan(theta / 2)
        a = spin_coherent_state_angles(p, theta, phi)
        b = spin_coherent_state(p, zeta)
        assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12


def test_angle_parameterization_poles():
    p = CollectiveSpinParams(9)
    north = spin_coherent_state_angles(p, 0.0, 0.3)
    assert np.allclose(north.amplitudes, dicke_basis_state(p, 0).amplitudes)
    south = spin_coherent_state_angles(p, np.pi, 0.3)
    assert abs(abs(south.amplitudes[-1]) - 1) < 1e-12


def test_amplitudes_are_read_only():
    p = CollectiveSpinParams(2)
    scs = spin_coherent_state(p, 1.0)
    with pytest.raises(ValueError):
        scs.amplitudes[0] = 0
