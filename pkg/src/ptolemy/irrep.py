"""The irreducible representation SL(2) -> SL(n) on matrices and on Ptolemy cochains.

Matrices act on binary forms of degree n-1 through the basis
v_k = C(n-1, k) X^(n-1-k) Y^k, with X and Y mapped to the first and second
columns of g.  The binomial factors make the unipotent generator land on
pi_{n-1}(x..x) ... pi_1(x) and the rotation-like generator on a
counter-diagonal matrix with entries a^(n-1), -a^(n-3), ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputCochain, NotUnitDeterminant
from .triangulation import EDGES

DET_TOL = 1e-10
RELATION_TOL = 1e-9


@dataclass(frozen=True)
class PhiImage:
    n: int
    source: np.ndarray
    image: np.ndarray


def phi_n_matrix(g, n):
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if n < 1:
        raise ValueError("n must be positive")
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if abs(det - 1) >= DET_TOL:
        raise NotUnitDeterminant(f"det = {det}")
    a, b = g[0]
    c, d = g[1]
    m = n - 1
    out = np.zeros((n, n), dtype=complex)
    for k in range(n):
        # expand (aX + cY)^(m-k) (bX + dY)^k
        for i in range(m - k + 1):
            left = math.comb(m - k, i) * a ** (m - k - i) * c**i
            for l in range(k + 1):
                right = math.comb(k, l) * b ** (k - l) * d**l
                out[i + l, k] += left * right
        out[:, k] *= math.comb(m, k)
    for j in range(n):
        out[j, :] /= math.comb(m, j)
    return out


def phi_image(g, n):
    return PhiImage(n, np.asarray(g, dtype=complex), phi_n_matrix(g, n))


def _edge_values(c):
    """Accept {edge: value}, {point of T^3(2): value}, or six values in edge order."""
    if isinstance(c, dict):
        out = {}
        for key, v in c.items():
            key = tuple(key)
            if len(key) == 4:
                key = tuple(i for i, x in enumerate(key) if x)
                if len(key) == 1:
                    continue  # vertex point
            out[tuple(sorted(key))] = complex(v)
    else:
        out = dict(zip(EDGES, (complex(v) for v in c)))
    if set(out) != set(EDGES):
        raise InvalidInputCochain("need a value on each of the six edges")
    if any(v == 0 for v in out.values()):
        raise InvalidInputCochain("Ptolemy coordinates must be nonzero")
    return out


def cochain_residual(c, face_signs=(1, 1, 1, 1)):
    """Residual of the level-2 relation; face_signs are sigma on the faces opposite 0..3."""
    c = _edge_values(c)
    s1 = face_signs[2] * face_signs[3]
    s2 = face_signs[0] * face_signs[3]
    return s1 * c[(0, 3)] * c[(1, 2)] + s2 * c[(0, 1)] * c[(2, 3)] - c[(0, 2)] * c[(1, 3)]


def phi_n_cochain(c, n, face_signs=(1, 1, 1, 1), tol=RELATION_TOL):
    """Level-n cochain t -> prod_{i<j} c_ij^(t_i t_j), over every point of T^3(n)."""
    from .variety import integral_points

    c = _edge_values(c)
    scale = max(abs(v) for v in c.values()) ** 2
    if abs(cochain_residual(c, face_signs)) > tol * max(1.0, scale):
        raise InvalidInputCochain("input does not satisfy the Ptolemy relation")
    out = {}
    for t in integral_points(n):
        v = 1 + 0j
        for i, j in EDGES:
            if t[i] * t[j]:
                v *= c[(i, j)] ** (t[i] * t[j])
        out[t] = v
    return out


def phi_n_lift(log_c, t):
    """Lift of a level-n coordinate from lifted edge values: sum t_j t_k log c_jk."""
    if isinstance(log_c, dict):
        log_c = {tuple(sorted(k)): complex(v) for k, v in log_c.items()}
    else:
        log_c = dict(zip(EDGES, (complex(v) for v in log_c)))
    return sum(t[i] * t[j] * log_c[(i, j)] for i, j in EDGES)


def lift_solution(system2, values, system_n, logs=None):
    """Push a level-2 solution on a triangulation to level n.

    Returns per-variable values for `system_n`, and per-variable lifts built
    from `logs` (lifts of the level-2 values) when given.
    """
    if system_n.tri is not system2.tri and system_n.tri != system2.tri:
        raise ValueError("systems live on different triangulations")
    out_values = []
    out_logs = [] if logs is not None else None
    for var in system_n.variables:
        s, t = var.representative
        edges = {(i, j): values[system2.var_index(s, _edge_point(i, j))] for i, j in EDGES}
        v = 1 + 0j
        for i, j in EDGES:
            if t[i] * t[j]:
                v *= complex(edges[(i, j)]) ** (t[i] * t[j])
        out_values.append(v)
        if logs is not None:
            lifted = {(i, j): logs[system2.var_index(s, _edge_point(i, j))] for i, j in EDGES}
            out_logs.append(phi_n_lift(lifted, t))
    return out_values, out_logs


def _edge_point(i, j):
    t = [0, 0, 0, 0]
    t[i] += 1
    t[j] += 1
    return tuple(t)


def scaling_check(system2, values, n, tol=1e-8):
    """Compare the regulator of the level-n push-forward with C(n+1,3) times the original.

    The comparison is done twice: with default lifts of the level-n values,
    and with lifts induced from the level-2 lifts (where every subsimplex
    carries the same flattening as the original).
    """
    from .bloch import complex_volume, lambda_element, lift_coordinates, reduce_real
    from .solver import verify_solution
    from .variety import generate_relations

    system_n = generate_relations(system2.tri, n, system2.sigma)
    psl = not system2.sigma.is_trivial()
    logs2 = lift_coordinates(values, psl)
    values_n, logs_n = lift_solution(system2, values, system_n, logs2)
    check = verify_solution(system_n, values_n)

    factor = math.comb(n + 1, 3)
    base = lambda_element(system2, values, psl=psl, logs=logs2)
    pushed = lambda_element(system_n, values_n, psl=psl)
    induced = lambda_element(system_n, values_n, psl=psl, logs=logs_n)
    modulus = base.modulus
    r_base = base.regulator()
    diff_default = reduce_real(pushed.regulator() - factor * r_base, modulus)
    diff_induced = reduce_real(induced.regulator() - factor * r_base, modulus)
    err = max(abs(diff_default), abs(diff_induced))
    return {
        "n": n,
        "factor": factor,
        "modulus": modulus,
        "relations_max_residual": check["max_residual"],
        "volume_base": complex_volume(base).value,
        "volume_pushed": complex_volume(pushed).value,
        "difference_default_lift": abs(diff_default),
        "difference_induced_lift": abs(diff_induced),
        "passed": bool(check["passed"] and err < tol),
        "values": values_n,
        "system": system_n,
    }
