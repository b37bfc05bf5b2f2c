import importlib
from math import factorial

import numpy as np
import pytest
from numpy.testing import assert_allclose

from monoground.efie import (Assembler, AssemblyOptions, Excitation, SolverError, assemble,
                             build_basis, solve, solve_image_ground, solve_mesh)
from monoground.efie import _kernels_py, kernels
from monoground.efie.quadrature import map_points, triangle_rule
from monoground.fom import far_field, radiated_power
from monoground.geometry import CoaxModel, Planar, dipole_mesh, generate, monopole_element_mesh

F0 = 1.3e9


# ----------------------------------------------------------------------------
# quadrature and kernels
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("degree", [1, 2, 3, 4, 5, 7, 10])
def test_triangle_rule_exact_for_monomials(degree):
    bary, w = triangle_rule(degree)
    assert_allclose(w.sum(), 1.0)
    # reference triangle (0,0), (1,0), (0,1): int x^a y^b = a! b! / (a+b+2)!
    x, y = bary[:, 1], bary[:, 2]
    for a in range(degree + 1):
        b = degree - a
        exact = factorial(a) * factorial(b) / factorial(a + b + 2)
        assert_allclose(0.5 * np.sum(w * x ** a * y ** b), exact, rtol=1e-10)


def test_triangle_rule_rejects_degree_zero():
    with pytest.raises(ValueError):
        triangle_rule(0)


def duffy_potential(obs, tri, n=200):
    """Reference integrals: split at the projection of ``obs`` and apply a
    Duffy map to each piece, which removes the in-plane singularity."""
    x, w = np.polynomial.legendre.leggauss(n)
    u, v = np.meshgrid(0.5 * (x + 1), 0.5 * (x + 1), indexing="ij")
    ww = np.outer(w, w) * 0.25
    nrm = np.cross(tri[1] - tri[0], tri[2] - tri[0])
    nrm /= np.linalg.norm(nrm)
    p = obs - np.dot(obs - tri[0], nrm) * nrm
    i0, i1 = 0.0, np.zeros(3)
    for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
        # signed area keeps the pieces consistent when p lies outside
        area2 = np.dot(np.cross(a - p, b - p), nrm)
        pts = p + u[..., None] * (a - p) + (u * v)[..., None] * (b - a)
        r = np.linalg.norm(pts - obs, axis=-1)
        jac = area2 * u
        i0 += np.sum(ww * jac / r)
        i1 += np.einsum("ij,ijd->d", ww * jac / r, pts)
    return i0, i1


@pytest.mark.parametrize("obs", [[0.3, 0.2, 2.0], [3.0, -1.0, 0.5], [0.2, 0.2, 0.0],
                                 [0.4, 0.3, 1e-3]])
def test_potential_integrals_against_quadrature(obs):
    tri = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.1, 0.9, 0.0]])
    obs = np.array(obs)
    i0, i1 = kernels.potential_integrals(obs[None], tri[None])
    r0, r1 = duffy_potential(obs, tri)
    assert_allclose(i0[0], r0, rtol=1e-6)
    assert_allclose(i1[0], r1, rtol=1e-6, atol=1e-9)


def test_backends_agree():
    try:
        compiled = importlib.import_module("monoground.efie._kernels")
    except ImportError:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(7)
    obs = rng.normal(size=(50, 3))
    tris = rng.normal(size=(50, 3, 3))
    a = _kernels_py.potential_integrals(obs, tris)
    b = compiled.potential_integrals(obs, tris)
    assert_allclose(a[0], b[0], rtol=1e-12)
    assert_allclose(a[1], b[1], rtol=1e-11, atol=1e-13)

    mesh = dipole_mesh(F0)
    basis = build_basis(mesh)
    za = None
    for impl in (_kernels_py, compiled):
        saved = {n: getattr(kernels, n) for n in
                 ("potential_integrals", "regular_slot_block", "near_slot_block")}
        try:
            for n in saved:
                setattr(kernels, n, getattr(impl, n))
            z = Assembler(basis).matrix(F0).z
        finally:
            for n, f in saved.items():
                setattr(kernels, n, f)
        if za is None:
            za = z
    assert_allclose(z, za, rtol=1e-10, atol=1e-12 * np.abs(za).max())


def test_backend_name():
    assert kernels.BACKEND in ("python", "compiled")


# ----------------------------------------------------------------------------
# basis and assembly
# ----------------------------------------------------------------------------

def test_basis_counts_interior_edges():
    mesh = generate(Planar(), CoaxModel(), 16.0, with_element=False)
    basis = build_basis(mesh)
    e = mesh.edges()
    t = mesh.triangles
    all_e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    _, counts = np.unique(all_e, axis=0, return_counts=True)
    assert basis.n == int(np.sum(counts == 2))
    assert len(e) == len(counts)


def test_feed_edges_marked():
    basis = build_basis(dipole_mesh(F0))
    assert basis.feed.sum() == 8


def test_matrix_is_symmetric():
    basis = build_basis(dipole_mesh(F0))
    z = assemble(basis, F0).z
    assert_allclose(z, z.T, rtol=0, atol=1e-8 * np.abs(z).max())


def test_threaded_assembly_identical():
    basis = build_basis(dipole_mesh(F0))
    a = assemble(basis, F0, AssemblyOptions(workers=1, block_size=16)).z
    b = assemble(basis, F0, AssemblyOptions(workers=3, block_size=16)).z
    assert np.array_equal(a, b)


# ----------------------------------------------------------------------------
# solutions
# ----------------------------------------------------------------------------

def test_dipole_impedance_regression(dipole_coarse):
    # converged delta-gap value for a 0.001 wavelength wire
    assert_allclose(dipole_coarse.zin.real, 85.6, atol=1.0)
    assert_allclose(dipole_coarse.zin.imag, 47.4, atol=1.5)
    assert dipole_coarse.residual < 1e-8


def test_linearity_in_voltage():
    mesh = dipole_mesh(F0)
    a = solve_mesh(mesh, F0)
    b = solve_mesh(mesh, F0, Excitation(voltage=2.0))
    assert_allclose(b.coefficients, 2 * a.coefficients, rtol=1e-10)
    assert_allclose(b.zin, a.zin, rtol=1e-12)


def test_image_monopole_halves_dipole(dipole_coarse, image_monopole):
    sol, _ = image_monopole
    assert_allclose(sol.zin, dipole_coarse.zin / 2, rtol=0.02)


@pytest.mark.parametrize("which", ["dipole_coarse", "image"])
def test_power_balance(which, dipole_coarse, image_monopole):
    sol = dipole_coarse if which == "dipole_coarse" else image_monopole[0]
    assert_allclose(radiated_power(sol), sol.input_power, rtol=1e-3)


def test_image_ground_rejects_geometry_below_plane():
    with pytest.raises(ValueError):
        solve_image_ground(dipole_mesh(F0), F0)


def test_no_feed_is_an_error():
    mesh = generate(Planar(), CoaxModel(), 16.0, with_element=False)
    basis = build_basis(mesh)
    with pytest.raises(ValueError, match="feed"):
        solve(assemble(basis, F0), basis, Excitation())


def test_unknown_cap():
    basis = build_basis(dipole_mesh(F0))
    with pytest.raises(SolverError):
        solve(assemble(basis, F0), basis, Excitation(), max_unknowns=10)


def test_zero_voltage_rejected():
    with pytest.raises(ValueError):
        Excitation(voltage=0)


def test_image_field_vanishes_below_horizon(image_monopole):
    _, pat = image_monopole
    below = pat.theta > np.pi / 2 + 1e-9
    assert np.all(np.abs(pat.e_theta[below]) == 0)


def test_far_field_grid_validation(dipole_coarse):
    with pytest.raises(ValueError):
        far_field(dipole_coarse, theta=np.array([]), phi=np.array([0.0]))


def test_monopole_fixture_is_above_plane():
    m = monopole_element_mesh(F0)
    assert m.vertices[:, 2].min() >= 0
