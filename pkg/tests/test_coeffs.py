"""Orthonormal coefficient bases and truncated kernel vectors."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berglab import spaces
from berglab.coeffs import (BasisSpec, CoeffFunction, eval_coeffs, from_flat,
                            inner, kernel_as_coeffs, kernel_coeff_vector,
                            kernel_tail_certificate, project_grid_function,
                            random_coeff_function, random_polynomial,
                            scalar_basis_matrix)
from berglab.quadrature import build_rule
from conftest import sample_points


def _gram(basis, rule):
    E = scalar_basis_matrix(basis, rule.nodes)
    return (E.conj() * rule.sigma_weights[None, :]) @ E.T


def test_scalar_basis_orthonormal(all_spaces):
    for sp in all_spaces:
        n = 6 if sp.nfactors == 2 else 16
        basis = BasisSpec(sp, n)
        G = _gram(basis, build_rule(sp))
        assert np.abs(G - np.eye(basis.n_scalar)).max() < 1e-10


def test_basis_dimensions(disc, bidisc):
    b = BasisSpec(disc, 10)
    assert (b.n_scalar, b.dim) == (10, 20)
    b2 = BasisSpec(bidisc, 4)
    assert (b2.n_scalar, b2.dim) == (16, 32)


def test_flat_layout_round_trip(disc_basis):
    rng = np.random.default_rng(0)
    c = rng.standard_normal((disc_basis.n_scalar, 2)) + 1j * rng.standard_normal((disc_basis.n_scalar, 2))
    f = CoeffFunction(disc_basis, c)
    assert f.flat.shape == (disc_basis.dim,)
    # row-major: scalar mode index is the slow axis
    assert f.flat[3] == c[1, 1]
    g = from_flat(disc_basis, f.flat)
    assert np.array_equal(g.coeffs, c)


def test_parseval(disc_basis, disc_rule):
    f = random_coeff_function(disc_basis, np.random.default_rng(1))
    vals = eval_coeffs(f, disc_rule.nodes)
    quad_sq = np.sum(disc_rule.sigma_weights[:, None] * np.abs(vals) ** 2)
    assert quad_sq == pytest.approx(np.sum(np.abs(f.coeffs) ** 2), rel=1e-10)
    assert f.norm() == pytest.approx(np.sqrt(quad_sq), rel=1e-10)


def test_inner_matches_quadrature(disc_basis, disc_rule):
    rng = np.random.default_rng(2)
    f = random_coeff_function(disc_basis, rng)
    g = random_coeff_function(disc_basis, rng)
    fv, gv = eval_coeffs(f, disc_rule.nodes), eval_coeffs(g, disc_rule.nodes)
    quad = np.sum(disc_rule.sigma_weights[:, None] * fv * np.conj(gv))
    assert complex(inner(f, g)) == pytest.approx(complex(quad), abs=1e-10)


def test_projection_recovers_band_limited(disc_basis, disc_rule):
    f = random_coeff_function(disc_basis, np.random.default_rng(3))
    back = project_grid_function(disc_basis, disc_rule, eval_coeffs(f, disc_rule.nodes))
    assert np.abs(back.coeffs - f.coeffs).max() < 1e-10


def test_projection_is_contractive(disc_basis, disc_rule):
    # projecting a non-band-limited grid function cannot increase the norm
    w = disc_rule.nodes
    vals = np.stack([np.conj(w), np.abs(w) ** 2], axis=-1)
    proj = project_grid_function(disc_basis, disc_rule, vals)
    grid_sq = float(np.sum(disc_rule.sigma_weights[:, None] * np.abs(vals) ** 2))
    assert proj.norm() ** 2 <= grid_sq + 1e-12


def test_kernel_coeff_vector_reproduces(all_spaces):
    for sp in all_spaces:
        n = 8 if sp.nfactors == 2 else 24
        basis = BasisSpec(sp, n)
        z = sample_points(sp, 1, seed=4, scale=0.45)[0]
        v = kernel_coeff_vector(basis, z)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        # pairing scalar coefficients against the raw vector is evaluation at z
        raw = kernel_coeff_vector(basis, z, normalized=False)
        rng = np.random.default_rng(40)
        c = rng.standard_normal(basis.n_scalar) + 1j * rng.standard_normal(basis.n_scalar)
        fz = complex(c @ scalar_basis_matrix(basis, z)[:, 0])
        assert complex(np.sum(c * np.conj(raw))) == pytest.approx(fz, abs=1e-12)
        # normalized vectors at two points recover the normalized pairing
        w = sample_points(sp, 1, seed=5, scale=0.4)[0]
        vw = kernel_coeff_vector(basis, w)
        exact = float(spaces.normalized_pairing(sp, z, w))
        assert abs(np.vdot(vw, v)) == pytest.approx(exact, abs=5e-6)


def test_kernel_as_coeffs_evaluates_kernel(disc):
    basis = BasisSpec(disc, 40)
    z = 0.35 * np.exp(0.9j)
    k = kernel_as_coeffs(basis, z, component=1, normalized=False)
    w = np.array([0.2 + 0.3j, -0.4, 0.1j])
    vals = eval_coeffs(k, w)
    assert np.allclose(vals[:, 0], 0.0)
    assert np.allclose(vals[:, 1], spaces.kernel_eval(disc, z, w), atol=1e-10)


def test_kernel_vector_gate(disc):
    basis = BasisSpec(disc, 8)
    with pytest.raises(ValueError):
        kernel_coeff_vector(basis, 0.97)


def test_kernel_tail_certificate(disc):
    basis = BasisSpec(disc, 10)
    cert = kernel_tail_certificate(basis, 0.5)
    assert 0.0 < cert < 1e-3
    # relative truncation residual of ||K_z||^2 computed by direct series
    partial = sum((m + 1) * 0.25 ** m for m in range(10))
    full = 1.0 / (1 - 0.25) ** 2
    assert cert == pytest.approx((full - partial) / full, rel=1e-10)


def test_random_polynomial_degree_support(disc, bidisc):
    rng = np.random.default_rng(6)
    f = random_polynomial(BasisSpec(disc, 16), rng, 4)
    assert np.linalg.norm(f.flat) == pytest.approx(1.0)
    assert np.all(f.coeffs[5:, :] == 0)
    assert np.any(f.coeffs[:5, :] != 0)
    g = random_polynomial(BasisSpec(bidisc, 5), rng, 2)
    c = g.coeffs.reshape(5, 5, -1)
    assert np.all(c[3:, :, :] == 0) and np.all(c[:, 3:, :] == 0)
    assert np.any(c[:3, :3, :] != 0)


def test_eval_matches_manual_series(disc):
    basis = BasisSpec(disc, 6)
    c = np.zeros((6, 2), dtype=complex)
    c[0, 0] = 1.0
    c[2, 1] = 2.0 - 1.0j
    f = CoeffFunction(basis, c)
    z = np.array([0.3 + 0.2j, -0.5j])
    vals = eval_coeffs(f, z)
    # alpha = 0 basis: e_m(z) = sqrt(m + 1) z^m
    manual = np.stack([np.ones(2), (2.0 - 1.0j) * np.sqrt(3) * z ** 2], axis=-1)
    assert np.allclose(vals, manual, atol=1e-13)


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_parseval_property(seed):
    sp = spaces.disc_space(0.0, d=2)
    basis = BasisSpec(sp, 10)
    rule = build_rule(sp)
    f = random_coeff_function(basis, np.random.default_rng(seed))
    vals = eval_coeffs(f, rule.nodes)
    quad_sq = float(np.sum(rule.sigma_weights[:, None] * np.abs(vals) ** 2))
    assert quad_sq == pytest.approx(float(np.sum(np.abs(f.coeffs) ** 2)), rel=1e-9)
