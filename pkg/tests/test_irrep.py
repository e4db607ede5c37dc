import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptolemy import errors
from ptolemy.bloch import flattening_of_subsimplex, lift_coordinates, principal_log
from ptolemy.irrep import (
    cochain_residual,
    lift_solution,
    phi_image,
    phi_n_cochain,
    phi_n_lift,
    phi_n_matrix,
    scaling_check,
)
from ptolemy.reconstruct import (
    build_cocycle,
    counter_diagonal,
    pi_product,
    ptolemy_from_tuple,
    random_unit_det,
)
from ptolemy.solver import verify_solution
from ptolemy.triangulation import EDGES
from ptolemy.variety import generate_relations, integral_points, subsimplices

PYTHAGOREAN = {(0, 3): 3, (1, 2): 3, (0, 2): 5, (1, 3): 5, (0, 1): 4, (2, 3): 4}


def random_sl2(rng):
    return random_unit_det(2, rng)


def close(a, b, tol=1e-10):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) < tol


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_unipotent_generator(n):
    x = 0.7 - 1.3j
    expected = np.eye(n, dtype=complex)
    for m in range(n - 1, 0, -1):
        expected = expected @ pi_product(n, [x] * m)
    assert close(phi_n_matrix([[1, x], [0, 1]], n), expected)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_rotation_generator(n):
    a = 1.2 + 0.4j
    entries = [(-1) ** k * a ** (n - 1 - 2 * k) for k in range(n)]
    assert close(phi_n_matrix([[0, -1 / a], [a, 0]], n), counter_diagonal(entries))


def test_rotation_generator_n3_explicit():
    a = 2.0 - 0.5j
    assert close(phi_n_matrix([[0, -1 / a], [a, 0]], 3), counter_diagonal([a**2, -1, a**-2]))


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_identity(n):
    assert close(phi_n_matrix(np.eye(2), n), np.eye(n))


def test_n2_is_identity_map():
    g = random_sl2(np.random.default_rng(0))
    assert close(phi_n_matrix(g, 2), g)


def test_not_unit_determinant():
    with pytest.raises(errors.NotUnitDeterminant):
        phi_n_matrix([[2, 0], [0, 1]], 3)
    with pytest.raises(ValueError):
        phi_n_matrix(np.eye(3), 3)


def test_image_unit_determinant():
    rng = np.random.default_rng(4)
    for n in range(2, 7):
        img = phi_image(random_sl2(rng), n)
        assert abs(np.linalg.det(img.image) - 1) < 1e-9


def test_homomorphism_hundred_pairs():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a, b = random_sl2(rng), random_sl2(rng)
        n = int(rng.integers(2, 7))
        lhs = phi_n_matrix(a @ b, n)
        rhs = phi_n_matrix(a, n) @ phi_n_matrix(b, n)
        assert np.max(np.abs(lhs - rhs)) < 1e-8 * max(1, np.max(np.abs(lhs)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_homomorphism_property(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_sl2(rng), random_sl2(rng)
    lhs = phi_n_matrix(a @ b, n)
    rhs = phi_n_matrix(a, n) @ phi_n_matrix(b, n)
    assert np.max(np.abs(lhs - rhs)) < 1e-8 * max(1, np.max(np.abs(lhs)))


def test_pythagorean_face_point():
    out = phi_n_cochain(PYTHAGOREAN, 3)
    assert out[(1, 1, 1, 0)] == 4 * 5 * 3 == 60


def test_vertex_points_are_one():
    out = phi_n_cochain(PYTHAGOREAN, 4)
    for t in integral_points(4):
        if max(t) == 4:
            assert out[t] == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_relations_preserved(n):
    rng = np.random.default_rng(n)
    c2 = ptolemy_from_tuple([random_unit_det(2, rng) for _ in range(4)], 2)
    out = phi_n_cochain(c2, n)
    for alpha in subsimplices(n):
        pts = {}
        for i, j in EDGES:
            t = list(alpha)
            t[i] += 1
            t[j] += 1
            pts[(i, j)] = out[tuple(t)]
        scale = max(abs(v) for v in pts.values()) ** 2
        assert abs(cochain_residual(pts)) < 1e-10 * max(1, scale)


def test_pythagorean_relations_on_all_subsimplices():
    out = phi_n_cochain(PYTHAGOREAN, 3)
    for alpha in subsimplices(3):
        pts = {}
        for i, j in EDGES:
            t = list(alpha)
            t[i] += 1
            t[j] += 1
            pts[(i, j)] = out[tuple(t)]
        assert cochain_residual(pts) == 0


def test_invalid_input_cochain():
    bad = dict(PYTHAGOREAN)
    bad[(0, 1)] = 4.5
    with pytest.raises(errors.InvalidInputCochain):
        phi_n_cochain(bad, 3)
    zero = dict(PYTHAGOREAN)
    zero[(0, 1)] = 0
    with pytest.raises(errors.InvalidInputCochain):
        phi_n_cochain(zero, 3)
    with pytest.raises(errors.InvalidInputCochain):
        phi_n_cochain({(0, 1): 1}, 3)


def test_point_keyed_input():
    by_point = {}
    for (i, j), v in PYTHAGOREAN.items():
        t = [0, 0, 0, 0]
        t[i] += 1
        t[j] += 1
        by_point[tuple(t)] = v
    assert phi_n_cochain(by_point, 3) == phi_n_cochain(PYTHAGOREAN, 3)


@pytest.mark.parametrize("n", [3, 4])
def test_cocycle_of_pushforward(n):
    # long and short edges of phi_n(c) are phi_n of those of c
    rng = np.random.default_rng(20 + n)
    c2 = ptolemy_from_tuple([random_unit_det(2, rng) for _ in range(4)], 2)
    base = build_cocycle(c2, 2)
    pushed = build_cocycle(phi_n_cochain(c2, n), n)
    for key, q in base.long_edges.items():
        assert close(pushed.long_edges[key], phi_n_matrix(q, n), 1e-8)
    for key, m in base.short_edges.items():
        assert close(pushed.short_edges[key], phi_n_matrix(m, n), 1e-8)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_flattening_collapse(n):
    rng = np.random.default_rng(30 + n)
    c2 = ptolemy_from_tuple([random_unit_det(2, rng) for _ in range(4)], 2)
    edges = {(i, j): c2[tuple(1 if k in (i, j) else 0 for k in range(4))] for i, j in EDGES}
    logs = {e: principal_log(v) for e, v in edges.items()}
    base = flattening_of_subsimplex(logs)
    count = 0
    for alpha in subsimplices(n):
        sub = {}
        for i, j in EDGES:
            t = list(alpha)
            t[i] += 1
            t[j] += 1
            sub[(i, j)] = phi_n_lift(logs, t)
        fl = flattening_of_subsimplex(sub)
        assert abs(fl.e - base.e) < 1e-12 and abs(fl.f - base.f) < 1e-12
        count += 1
    assert count == math.comb(n + 1, 3)


def test_fig8_push_to_four(fig8_psl):
    system, result = fig8_psl
    system4 = generate_relations(system.tri, 4, system.sigma)
    for sol in result:
        values4, logs4 = lift_solution(system, list(sol.values), system4, lift_coordinates(sol.values, True))
        assert verify_solution(system4, values4, tol=1e-10)["passed"]
        assert len(logs4) == len(values4)


def test_scaling_identity_at_two(fig8_psl):
    system, result = fig8_psl
    rep = scaling_check(system, list(result[0].values), 2)
    assert rep["factor"] == 1 and rep["passed"]


def test_scaling_fig8_four(fig8_psl):
    system, result = fig8_psl
    vols = []
    for sol in result:
        rep = scaling_check(system, list(sol.values), 4)
        assert rep["factor"] == 10 and rep["passed"]
        assert rep["modulus"] == pytest.approx(math.pi**2)
        vols.append(rep["volume_pushed"].real)
    assert sorted(vols) == pytest.approx([-20.29883212, 20.29883212], abs=1e-7)


def test_scaling_five2_three(five2_psl2):
    system, result = five2_psl2
    for sol in result:
        rep = scaling_check(system, list(sol.values), 3)
        assert rep["factor"] == 4 and rep["passed"]
        assert rep["difference_default_lift"] < 1e-8 and rep["difference_induced_lift"] < 1e-8
