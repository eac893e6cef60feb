import math

import numpy as np
import pytest
from scipy import integrate

from hwopsip.assembly import assemble_system
from hwopsip.elements import cr_interpolate_mesh, face_means
from hwopsip.errors import (
    DiscreteSolution,
    broken_h1_seminorm_sq,
    convergence_indicator,
    energy_error,
    energy_error_parts,
    hwop_norm,
    jump_seminorm_sq,
    l2_error,
    l2_norm_discrete,
    reference_norms,
    source_l2_norm,
)
from hwopsip.exact import ExactSolution, boundary_layer, sine, zero
from hwopsip.mesh import MeshFamily, generate, mesh_size

FAMILIES = ["standard", "shishkin", "cosine", "quadratic"]


@pytest.fixture(scope="module")
def mesh8():
    return generate(MeshFamily("cosine", 8))


def interpolant_pair(mesh, exact):
    return DiscreteSolution(mesh, cr_interpolate_mesh(mesh, exact.u), face_means(mesh, exact.u))


def test_zero_cases(mesh8):
    sol = DiscreteSolution.zero(mesh8)
    assert energy_error(sol, zero()) == 0.0
    assert l2_error(sol, zero()) == 0.0
    assert hwop_norm(sol) == 0.0


@pytest.mark.parametrize("exact", [boundary_layer(), sine()], ids=["layer", "sine"])
def test_interpolant_pair_has_no_jump(mesh8, exact):
    sol = interpolant_pair(mesh8, exact)
    vol, jump = energy_error_parts(sol, exact)
    assert jump == 0.0
    assert energy_error(sol, exact) == math.sqrt(vol)
    assert vol > 0


def test_jump_part_via_assembled_form(mesh8, rng):
    # the interpolant pair is jump free, so the jump part of (u_h, lambda_h)
    # equals the quadratic form on the difference minus its broken H1 part
    exact = boundary_layer()
    s = assemble_system(mesh8, None)
    x = rng.normal(size=s.matrix.n) * 1e-5
    sol = DiscreteSolution.from_reduced(mesh8, s.dofmap, x)
    ip = interpolant_pair(mesh8, exact)
    d = s.dofmap.join(sol.cr - ip.cr, sol.multipliers - ip.multipliers)
    dcr, _ = s.dofmap.split(d)
    jump_form = d @ s.matrix.matvec(d) - broken_h1_seminorm_sq(mesh8, dcr)
    _, jump = energy_error_parts(sol, exact)
    assert jump_form == pytest.approx(jump, rel=1e-11)


def test_jump_beta_scaling(mesh8, rng):
    cr = rng.normal(size=(mesh8.n_elements, 3))
    lam = rng.normal(size=mesh8.n_faces)
    lam[mesh8.is_boundary_face] = 0
    h = mesh_size(mesh8)
    j1 = jump_seminorm_sq(mesh8, cr, lam, beta=1.0)
    j0 = jump_seminorm_sq(mesh8, cr, lam, beta=0.0)
    assert j1 == pytest.approx(h ** -2 * j0, rel=1e-14)


def test_discrete_l2_norm_exact_for_linears(mesh8):
    # u_h = x1 on every element: ||x1||^2 = 1/3
    mid = 0.5 * mesh8.vertices[mesh8.face_vertices].sum(axis=1)
    sol = DiscreteSolution(mesh8, mid[mesh8.element_faces, 0], np.zeros(mesh8.n_faces))
    assert l2_norm_discrete(sol) == pytest.approx(math.sqrt(1 / 3), rel=1e-14)


@pytest.mark.parametrize("e_h,e_h2,r", [
    (1.0, 0.5, 1.0),
    (7.20357e-01, 1.35710e-01, 2.41),
    (8.35897e-01, 5.57943e-01, 0.58),
])
def test_convergence_indicator(e_h, e_h2, r):
    assert round(convergence_indicator(e_h, e_h2), 2) == r


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, -1.0), (math.nan, 1.0)])
def test_convergence_indicator_rejects(bad):
    with pytest.raises(ValueError):
        convergence_indicator(*bad)


def test_reference_norms_zero():
    assert reference_norms(zero(), generate(MeshFamily("standard", 4))) == {"h1": 0.0, "l2": 0.0}


def test_reference_norms_polynomial():
    def u(x1, x2):
        return x1 * (1 - x1) + 0 * x2

    def grad(x1, x2):
        return 1 - 2 * x1, 0 * x2

    exact = ExactSolution(u, grad, lambda x1, x2: -2 + 0 * x1)
    n = reference_norms(exact, generate(MeshFamily("standard", 4)))
    assert n["l2"] ** 2 == pytest.approx(1 / 30, rel=1e-14)
    assert n["h1"] ** 2 == pytest.approx(1 / 3, rel=1e-14)
    assert source_l2_norm(exact.f, generate(MeshFamily("standard", 4))) == pytest.approx(2.0)


def _layer_norms_1d():
    from hwopsip.exact import _dg, _g

    rate = 128.0

    def quad(fun):
        return integrate.quad(fun, 0, 1, epsabs=0, epsrel=1e-13, limit=200)[0]

    gg = quad(lambda s: _g(s) ** 2)
    dgg = quad(lambda s: _dg(s) ** 2)
    qq = quad(lambda s: (_g(s) * math.exp(-rate * s)) ** 2)
    dqq = quad(lambda s: ((_dg(s) - rate * _g(s)) * math.exp(-rate * s)) ** 2)
    return math.sqrt(dgg * qq + gg * dqq), math.sqrt(gg * qq)


def test_reference_norms_layer_against_1d_quadrature():
    h1, l2 = _layer_norms_1d()
    n = reference_norms(boundary_layer(), generate(MeshFamily("quadratic", 256)))
    assert n["h1"] == pytest.approx(h1, rel=1e-12)
    assert n["l2"] == pytest.approx(l2, rel=1e-12)


def test_reference_norms_stable_across_quadrature_meshes():
    a = reference_norms(boundary_layer(), generate(MeshFamily("quadratic", 128)))
    b = reference_norms(boundary_layer(), generate(MeshFamily("quadratic", 256)))
    for k in ("h1", "l2"):
        assert a[k] == pytest.approx(b[k], rel=1e-6)


def test_exact_solution_vanishes_on_boundary(rng):
    s = rng.uniform(size=50)
    u = boundary_layer().u
    for x1, x2 in [(0 * s, s), (1 + 0 * s, s), (s, 0 * s), (s, 1 + 0 * s)]:
        assert np.all(u(x1, x2) == 0)


def test_gradient_matches_richardson_differences(rng):
    exact = boundary_layer()
    x1, x2 = rng.uniform(size=(2, 100))
    h = 1e-4

    def cd(fun, step):
        return (fun(step) - fun(-step)) / (2 * step)

    for k, shift in enumerate([lambda t: exact.u(x1 + t, x2), lambda t: exact.u(x1, x2 + t)]):
        fd = (4 * cd(shift, h / 2) - cd(shift, h)) / 3
        g = exact.grad_u(x1, x2)[k]
        assert np.max(np.abs(fd - g)) <= 1e-8 * np.max(np.abs(g))


def test_sine_source():
    exact = sine()
    assert exact.f(0.5, 0.5) == pytest.approx(2 * math.pi ** 2)


def test_cr_interpolant_error_small_on_graded_mesh():
    exact = boundary_layer()
    e = [energy_error(interpolant_pair(generate(MeshFamily("quadratic", n)), exact), exact)
         for n in (16, 32)]
    assert convergence_indicator(*e) == pytest.approx(1.0, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("family", FAMILIES)
def test_energy_error_monotone(study_cache, family):
    e = [r.E_H1 for r in study_cache(family)]
    assert all(a > b for a, b in zip(e, e[1:]))


@pytest.mark.slow
@pytest.mark.parametrize("family", FAMILIES)
def test_discrete_poincare_monitor(study_cache, family):
    ratios = [l2_norm_discrete(r.extras["solution"]) / hwop_norm(r.extras["solution"], beta=0.0)
              for r in study_cache(family)]
    assert max(ratios) <= 1.1 * ratios[0]
