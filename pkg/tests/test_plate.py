import numpy as np
import pytest

from conftest import E, H, NU, square_case
from fracefg.errors import ConfigurationError
from fracefg.fracdiff import FracParams
from fracefg.geometry import make_uniform_grid, rectangle_mesh
from fracefg.plate import (Material, PlateCase, PlateModel, apply_essential_bcs,
                           assemble, bl_matrix, bn_matrix, constitutive,
                           dt_matrix, recover_strains)
from fracefg.solver import solve_case


@pytest.fixture(scope="module")
def frac_model():
    return PlateModel(square_case(6, alpha=0.8, h_l=0.5, n_gjp=12,
                                  mode="nonlinear"))


@pytest.fixture(scope="module")
def local_model():
    return PlateModel(square_case(8))


def _state(model, scale, seed=0):
    rng = np.random.default_rng(seed)
    n = model.n
    x, y = model.case.cloud.nodes.T
    bump = np.sin(np.pi * x) * np.sin(np.pi * y)
    u = np.concatenate([1e-3 * rng.standard_normal(n) * bump,
                        1e-3 * rng.standard_normal(n) * bump, bump])
    return scale * u


def test_constitutive_plane_stress():
    C = constitutive(Material(E, NU))
    f = E / (1 - NU ** 2)
    assert C[0, 0] == pytest.approx(f)
    assert C[0, 1] == pytest.approx(f * NU)
    assert C[2, 2] == pytest.approx(f * (1 - NU) / 2)


def test_dt_matrix_blocks():
    D = dt_matrix(Material(E, NU), H)
    C = constitutive(Material(E, NU))
    assert np.allclose(D[:3, :3], H * C)
    assert np.allclose(D[3:, 3:], H ** 3 / 12 * C)
    assert np.all(D[:3, 3:] == 0)


@pytest.mark.parametrize("E_, nu", [(-1.0, 0.3), (1e6, 0.5), (1e6, -1.0)])
def test_material_validation(E_, nu):
    with pytest.raises(ConfigurationError):
        Material(E_, nu)


def test_thin_plate_requirement():
    cloud = make_uniform_grid(1, 1, 4, 4)
    br = np.linspace(0, 1, 5)
    with pytest.raises(ConfigurationError):
        PlateCase(cloud, rectangle_mesh(br, br), Material(E, NU), 0.05,
                  FracParams(1.0, 0.5), 1.0)


def test_mode_validation():
    with pytest.raises(ConfigurationError):
        square_case(4, mode="dynamic")


def test_b_matrix_shapes(frac_model):
    fb = frac_model.frac_b(0)
    n = frac_model.n
    assert bl_matrix(fb).shape == (6, 3 * n)
    bn = bn_matrix(fb, np.zeros(3 * n))
    assert bn.shape == (6, 3 * n) and not bn.any()


def test_linear_stiffness_symmetric_psd(frac_model, local_model):
    for m in (frac_model, local_model):
        K = m.K_lin
        assert np.abs(K - K.T).max() <= 1e-10 * np.abs(K).max()
        ev = np.linalg.eigvalsh(K)
        assert ev.min() > -1e-9 * ev.max()


def test_linear_stiffness_matches_b_matrices(frac_model):
    m = frac_model
    D = dt_matrix(m.case.material, m.case.h)
    K = sum(w * bl_matrix(m.frac_b(i)).T @ D @ bl_matrix(m.frac_b(i))
            for i, w in enumerate(m.wts))
    assert np.allclose(K, m.K_lin, rtol=0, atol=1e-9 * np.abs(K).max())


def test_internal_force_departs_quadratically(frac_model):
    u = _state(frac_model, 1e-6)
    d1 = frac_model.internal_force(u) - frac_model.K_lin @ u
    d2 = frac_model.internal_force(2 * u) - frac_model.K_lin @ (2 * u)
    n = frac_model.n
    # in-plane rows pick up only the w'^2 terms
    assert np.linalg.norm(d2[:2 * n]) == pytest.approx(
        4 * np.linalg.norm(d1[:2 * n]), rel=1e-3)


@pytest.mark.parametrize("beta", [1.0, 0.5])
def test_tangent_matches_finite_differences(frac_model, beta):
    u = _state(frac_model, 0.02)
    K = frac_model.tangent(u, beta)
    rng = np.random.default_rng(1)
    for _ in range(3):
        d = _state(frac_model, 0.02, seed=int(rng.integers(100)))
        eps = 1e-6
        fd = (frac_model.internal_force(u + eps * d, beta)
              - frac_model.internal_force(u - eps * d, beta)) / (2 * eps)
        assert np.linalg.norm(K @ d - fd) <= 1e-4 * np.linalg.norm(fd)


def test_energy_tangent_symmetric(frac_model):
    K = frac_model.tangent(_state(frac_model, 0.03), 1.0)
    assert np.abs(K - K.T).max() <= 1e-9 * np.abs(K).max()


def test_secant_stiffness_reproduces_residual(frac_model):
    u = _state(frac_model, 0.03)
    Ks = frac_model.secant_stiffness(u)
    r = frac_model.internal_force(u, 0.5)
    assert np.allclose(Ks @ u, r, atol=1e-10 * np.abs(r).max())
    assert np.abs(Ks - Ks.T).max() <= 1e-9 * np.abs(Ks).max()
    Ke = frac_model.secant_stiffness(u, beta=1.0)
    r = frac_model.internal_force(u, 1.0)
    assert np.allclose(Ke @ u, r, atol=1e-10 * np.abs(r).max())


def test_assemble_zero_state_is_linear(frac_model):
    sys_ = assemble(frac_model.case, model=frac_model)
    assert np.array_equal(sys_.K, frac_model.K_lin)
    assert sys_.F[:2 * frac_model.n].sum() == 0
    # total transverse load equals q0 times the plate area
    assert sys_.F.sum() == pytest.approx(frac_model.case.q0, rel=1e-10)


def test_bcs_replace_boundary_rows(local_model):
    case = local_model.case
    s = apply_essential_bcs(assemble(case, model=local_model), case,
                            local_model)
    nb = len(case.cloud.boundary_indices())
    assert len(s.constrained_rows) == 3 * nb
    assert np.all(s.F[s.constrained_rows] == 0)


def test_collocation_residual(local_model):
    res = solve_case(local_model.case, model=local_model)
    idx, phi_u, phi_w = local_model.collocation()
    u, v, w = res.fields()
    scale = np.abs(w).max()
    for phi, f in ((phi_u, u), (phi_u, v), (phi_w, w)):
        assert np.abs(phi @ f).max() <= 1e-8 * scale


def test_load_linearity(local_model):
    w1 = solve_case(local_model.case, model=local_model).center_deflection
    c2 = square_case(8, q0=2.5)
    c2.cloud, c2.mesh = local_model.case.cloud, local_model.case.mesh
    w2 = solve_case(c2, model=local_model.with_case(c2)).center_deflection
    assert w2 == pytest.approx(2.5 * w1, rel=1e-12)


def test_mirror_symmetry(frac_model):
    lin = frac_model.with_case(PlateCase(**{
        **frac_model.case.__dict__, "mode": "linear"}))
    res = solve_case(lin.case, model=lin)
    pts = np.array([[0.3, 0.4], [0.2, 0.7], [0.45, 0.1]])
    w = lin.deflection(res.u_g, pts)
    for mirror in (np.c_[1 - pts[:, 0], pts[:, 1]],
                   np.c_[pts[:, 0], 1 - pts[:, 1]], pts[:, ::-1]):
        assert np.allclose(lin.deflection(res.u_g, mirror), w,
                           rtol=1e-8)


def test_with_case_rejects_other_discretization(frac_model):
    other = square_case(6, alpha=0.9, h_l=0.5, n_gjp=12)
    with pytest.raises(ConfigurationError):
        frac_model.with_case(other)


def test_recover_strains(local_model):
    res = solve_case(local_model.case, model=local_model)
    out = recover_strains(local_model.case, res.u_g,
                          [[0.5, 0.5], [0.25, 0.5]], local_model)
    assert out["strain"].shape == (2, 3, 3)
    # the two faces bend opposite ways about the mid-plane
    low, mid, up = out["strain"][0]
    assert np.allclose(low + up, 2 * mid)
    assert (low[0] - mid[0]) * (up[0] - mid[0]) < 0
    with pytest.raises(ValueError):
        recover_strains(local_model.case, res.u_g, [[1.5, 0.5]])
