"""From Ptolemy coordinates back to matrices.

Covers the determinant formula for coordinates of a tuple of matrices,
the x^-1 A y = q decomposition, long and short edge labels of a truncated
simplex, and the round-trip check tying them together.  Indices in the
matrix formulas are 1-based as in the usual statement; arrays are numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    DisconnectedPath,
    FaceProductMismatch,
    NonGenericMatrix,
    NonGenericTuple,
    RoundTripMismatch,
    ZeroCoordinate,
)
from .triangulation import order_preserving_map

GENERIC_TOL = 1e-12


def counter_diagonal(a):
    """q(a_1, ..., a_n): a_k sits at row n-k+1, column k."""
    n = len(a)
    q = np.zeros((n, n), dtype=complex)
    for k in range(1, n + 1):
        q[n - k, k - 1] = a[k - 1]
    return q


def elementary(n, k, x):
    """x_k(x): identity plus x at (k, k+1)."""
    m = np.eye(n, dtype=complex)
    m[k - 1, k] = x
    return m


def pi_product(n, values):
    """pi(b_1, ..., b_k) = x_1(b_1) x_2(b_2) ... x_k(b_k)."""
    m = np.eye(n, dtype=complex)
    for k, b in enumerate(values, 1):
        m = m @ elementary(n, k, b)
    return m


def minor(a, rows, cols):
    """Determinant of the submatrix on 1-based `rows` x `cols` (empty -> 1)."""
    if not rows:
        return 1.0 + 0j
    sub = a[np.ix_([r - 1 for r in rows], [c - 1 for c in cols])]
    return complex(np.linalg.det(sub))


def random_unit_det(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    d = np.linalg.det(g)
    return g / d ** (1.0 / n)


# --- determinant oracle -----------------------------------------------------

def ptolemy_from_tuple(matrices, n=None, tol=GENERIC_TOL):
    """Coordinates c_t = det(first t_0 columns of g_0 | first t_1 of g_1 | ...).

    Returns a dict over every point t of T^k(n), vertex points included.
    """
    from .variety import simplex_points

    mats = [np.asarray(g, dtype=complex) for g in matrices]
    n = n or mats[0].shape[0]
    out = {}
    for t in simplex_points(len(mats) - 1, n):
        cols = [g[:, :ti] for g, ti in zip(mats, t)]
        c = complex(np.linalg.det(np.concatenate(cols, axis=1)))
        if abs(c) < tol:
            raise NonGenericTuple(f"coordinate at {t} vanishes ({abs(c):.2e})")
        out[t] = c
    return out


# --- x^-1 A y = q ------------------------------------------------------------

def check_generic(a, tol=GENERIC_TOL):
    n = a.shape[0]
    for k in range(1, n + 1):
        rows = list(range(k, n + 1))
        cols = list(range(1, n - k + 2))
        if abs(minor(a, rows, cols)) < tol:
            raise NonGenericMatrix(f"minor rows {k}..{n}, columns 1..{n - k + 1} vanishes")


def xyq_decompose(a, tol=GENERIC_TOL):
    """Unit upper-triangular x, y and counter-diagonal q with x^-1 A y = q."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    check_generic(a, tol)
    qvals = []
    for j in range(1, n + 1):
        num = minor(a, list(range(n - j + 1, n + 1)), list(range(1, j + 1)))
        den = minor(a, list(range(n - j + 2, n + 1)), list(range(1, j)))
        qvals.append((-1) ** (j - 1) * num / den)
    x = np.eye(n, dtype=complex)
    y = np.eye(n, dtype=complex)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            cols = list(range(1, n - j + 2))
            x[i - 1, j - 1] = minor(a, [i] + list(range(j + 1, n + 1)), cols) / minor(
                a, list(range(j, n + 1)), cols
            )
            rows = list(range(n - j + 2, n + 1))
            y[i - 1, j - 1] = (-1) ** (i + j) * minor(
                a, rows, [c for c in range(1, j + 1) if c != i]
            ) / minor(a, rows, list(range(1, j)))
    return x, y, counter_diagonal(qvals)


# --- long and short edges ----------------------------------------------------

def _coord(c, t):
    t = tuple(t)
    if max(t) == sum(t):
        return c.get(t, 1.0)
    v = c[t]
    if abs(v) == 0:
        raise ZeroCoordinate(f"coordinate at {t} is zero")
    return v


def long_edge(c, i, j, n, dim=4):
    """Counter-diagonal label of the long edge from vertex i to vertex j.

    `c` maps points of T^{dim-1}(n) to coordinates (vertex points may be
    omitted and count as 1).  For i > j the label is the inverse of the
    i < j one.
    """
    if i > j:
        return np.linalg.inv(long_edge(c, j, i, n, dim))
    a = []
    for k in range(1, n + 1):
        top = [0] * dim
        top[i], top[j] = n - k, k
        bot = [0] * dim
        bot[i], bot[j] = n - k + 1, k - 1
        a.append((-1) ** (k - 1) * _coord(c, top) / _coord(c, bot))
    return counter_diagonal(a)


@dataclass(frozen=True)
class DiamondCoordinate:
    face: tuple
    vertex: int
    position: tuple  # (r, s)
    value: complex


def diamond_coordinates(c, face, vertex, n, face_sign=1, dim=4):
    """Type-`vertex` diamond coordinates on `face` (a triple of simplex vertices).

    The diamond (r, s) has its top corner p with p_v = s+1, p_k = r-1 (k the
    larger of the other two vertices); its other corners are
    p - e_v + e_j, p - e_v + e_k and p - 2e_v + e_j + e_k.
    """
    face = tuple(sorted(face))
    if vertex not in face:
        raise ValueError("type vertex must lie on the face")
    lo, hi = [w for w in face if w != vertex]
    # sign -1 when the type vertex is the smallest or largest of the face
    sign = 1 if face[1] == vertex else -1
    out = []
    for r in range(1, n):
        for s in range(1, n - r + 1):
            p = [0] * dim
            p[vertex], p[hi], p[lo] = s + 1, r - 1, n - s - r
            u1 = list(p)
            u1[vertex] -= 1
            u1[lo] += 1
            u2 = list(p)
            u2[vertex] -= 1
            u2[hi] += 1
            w = list(p)
            w[vertex] -= 2
            w[lo] += 1
            w[hi] += 1
            value = sign * face_sign * _coord(c, p) * _coord(c, w) / (_coord(c, u1) * _coord(c, u2))
            out.append(DiamondCoordinate(face, vertex, (r, s), value))
    return out


def short_edge(c, i, j, k, n, face_sign=1, dim=4):
    """Unit upper-triangular label at vertex i from the j-corner to the k-corner."""
    if j > k:
        return np.linalg.inv(short_edge(c, i, k, j, n, face_sign, dim))
    d = {dc.position: dc.value for dc in diamond_coordinates(c, (i, j, k), i, n, face_sign, dim)}
    m = np.eye(n, dtype=complex)
    for r in range(1, n):
        m = m @ pi_product(n, [d[(r, s)] for s in range(1, n - r + 1)])
    return m


# --- truncated simplex cocycles -----------------------------------------------

@dataclass
class TruncatedSimplexCocycle:
    n: int
    long_edges: dict  # (i, j) with i < j -> counter-diagonal matrix
    short_edges: dict  # (i, j, k) with j < k -> unit upper-triangular matrix

    def long(self, i, j):
        return self.long_edges[(i, j)] if i < j else np.linalg.inv(self.long_edges[(j, i)])

    def short(self, i, j, k):
        return self.short_edges[(i, j, k)] if j < k else np.linalg.inv(self.short_edges[(i, k, j)])

    def face_product(self, i, j, k):
        """Product around the hexagon of face {i, j, k}, i < j < k."""
        return (
            self.short(i, j, k) @ self.long(i, k) @ self.short(k, i, j)
            @ self.long(k, j) @ self.short(j, k, i) @ self.long(j, i)
        )

    def tuple_representatives(self):
        """(I, q01, a012 q02, a013 q03): matrices whose coordinates reproduce the input."""
        out = [np.eye(self.n, dtype=complex), self.long(0, 1)]
        for k in (2, 3):
            out.append(self.short(0, 1, k) @ self.long(0, k))
        return out


def _face_signs(sigma_on_simplex):
    # sign of face {i,j,k} is sigma on the face opposite the missing vertex
    if sigma_on_simplex is None:
        return {f: 1 for f in range(4)}
    return {f: sigma_on_simplex[f] for f in range(4)}


def build_cocycle(c, n, sigma_on_simplex=None):
    signs = _face_signs(sigma_on_simplex)
    longs = {(i, j): long_edge(c, i, j, n) for i, j in combinations(range(4), 2)}
    shorts = {}
    for i in range(4):
        others = [v for v in range(4) if v != i]
        for j, k in combinations(others, 2):
            missing = ({0, 1, 2, 3} - {i, j, k}).pop()
            shorts[(i, j, k)] = short_edge(c, i, j, k, n, signs[missing])
    return TruncatedSimplexCocycle(n, longs, shorts)


def reconstruct_and_verify(c, n, sigma_on_simplex=None, tol=1e-9):
    """Rebuild the truncated-simplex cocycle from coordinates and check it.

    Returns (cocycle, report).  With a nontrivial sigma the coordinates are
    only recovered up to sign.
    """
    signs = _face_signs(sigma_on_simplex)
    psl = any(v == -1 for v in signs.values())
    cocycle = build_cocycle(c, n, sigma_on_simplex)
    mats = cocycle.tuple_representatives()
    recon = ptolemy_from_tuple(mats, n, tol=0.0)
    worst = 0.0
    for t, v in recon.items():
        if max(t) == n:
            continue
        target = c[t]
        err = min(abs(v - target), abs(v + target)) if psl else abs(v - target)
        worst = max(worst, err / max(1.0, abs(target)))
    if worst > tol:
        raise RoundTripMismatch(f"reconstructed coordinates differ by {worst:.3g}")
    face_errors = {}
    eye = np.eye(n)
    for face in combinations(range(4), 3):
        missing = ({0, 1, 2, 3} - set(face)).pop()
        prod = cocycle.face_product(*face)
        err = float(np.max(np.abs(prod - signs[missing] * eye)))
        face_errors[face] = err
        if err > tol:
            raise FaceProductMismatch(f"face {face} product is off by {err:.3g}")
    report = {"round_trip_error": worst, "face_errors": face_errors}
    return cocycle, report


def simplex_coordinates(system, values, s):
    """Coordinates of one simplex of a global solution, keyed by point."""
    from .variety import integral_points

    out = {}
    for t in integral_points(system.n):
        if max(t) == system.n:
            continue
        out[t] = complex(values[system.var_index(s, t)])
    return out


# --- paths through the truncated complex ------------------------------------

def corner_classes(tri):
    """Union-find over corners (simplex, vertex, toward) of truncated simplices."""
    parent = {}
    for s in range(tri.simplex_count):
        for v in range(4):
            for a in range(4):
                if a != v:
                    parent[(s, v, a)] = (s, v, a)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(tri.simplex_count):
        for f in range(4):
            s2, g = tri.gluings[s][f]
            perm = order_preserving_map(f, g)
            for v in range(4):
                for a in range(4):
                    if f in (v, a) or v == a:
                        continue
                    x, y = find((s, v, a)), find((s2, perm[v], perm[a]))
                    if x != y:
                        parent[max(x, y)] = min(x, y)
    return {k: find(k) for k in parent}


def _endpoints(step):
    kind = step[0]
    if kind == "long":
        _, s, i, j = step
        return (s, i, j), (s, j, i)
    if kind == "short":
        _, s, i, j, k = step
        return (s, i, j), (s, i, k)
    raise ValueError(f"unknown path step {step!r}")


def path_product(tri, cocycles, path):
    """Ordered product of edge labels along a path.

    Steps are ("long", s, i, j) or ("short", s, i, j, k); a step is traversed
    in the given direction, so reversed edges contribute inverses.
    """
    if not path:
        n = next(iter(cocycles)).n if cocycles else 1
        return np.eye(n, dtype=complex)
    corners = corner_classes(tri)
    prev_end = None
    result = None
    for step in path:
        start, end = _endpoints(step)
        if prev_end is not None and corners[prev_end] != corners[start]:
            raise DisconnectedPath(f"step {step!r} does not start where the previous step ended")
        cocycle = cocycles[step[1]]
        label = cocycle.long(*step[2:]) if step[0] == "long" else cocycle.short(*step[2:])
        result = label if result is None else result @ label
        prev_end = end
    return result
