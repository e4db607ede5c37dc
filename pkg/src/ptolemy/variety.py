"""Ptolemy varieties of an ordered triangulation as explicit polynomial systems."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ._linalg import rational_rank
from ._poly import Polynomial
from .errors import InvalidCocycle, UnsupportedFormat
from .triangulation import EDGES, Z2Cocycle, is_cocycle


def simplex_points(k, level):
    """T^k(level): non-negative integer (k+1)-tuples summing to `level`, lexicographic."""
    if k == 0:
        return [(level,)]
    out = []
    for first in range(level + 1):
        for rest in simplex_points(k - 1, level - first):
            out.append((first,) + rest)
    return out


def integral_points(n):
    return simplex_points(3, n)


def subsimplices(n):
    """Anchors alpha in T^3(n-2) of the subsimplices of the n-th subdivision."""
    return simplex_points(3, n - 2)


def is_vertex_point(t, n):
    return max(t) == n


def point_label(t):
    if max(t) < 10:
        return "".join(str(x) for x in t)
    return "_".join(str(x) for x in t)


@dataclass(frozen=True)
class PtolemyVariable:
    index: int
    representative: tuple  # (simplex, point)
    members: tuple

    @property
    def name(self):
        s, t = self.representative
        return f"c_s{s}_{point_label(t)}"

    @property
    def point(self):
        return self.representative[1]


@dataclass(frozen=True)
class PtolemyRelation:
    """coeffs[0]*m0 + coeffs[1]*m1 + coeffs[2]*m2 = 0, each m a pair of variable indices.

    m0 = c_{a03} c_{a12}, m1 = c_{a01} c_{a23}, m2 = c_{a02} c_{a13}.
    """

    simplex: int
    alpha: tuple
    monomials: tuple
    coeffs: tuple


def identify_variables(tri, n):
    """Classes of non-vertex integral points under the face identifications."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    points = [t for t in integral_points(n) if not is_vertex_point(t, n)]
    for s in range(tri.simplex_count):
        for t in points:
            parent[(s, t)] = (s, t)
    for s in range(tri.simplex_count):
        for t in points:
            for other in tri.glue_point(s, t):
                a, b = find((s, t)), find(other)
                if a != b:
                    if b < a:
                        a, b = b, a
                    parent[b] = a
    groups = {}
    for key in parent:
        groups.setdefault(find(key), []).append(key)
    classes = sorted(tuple(sorted(g)) for g in groups.values())
    return [PtolemyVariable(i, c[0], c) for i, c in enumerate(classes)]


@dataclass
class PolynomialSystem:
    tri: object
    n: int
    sigma: Z2Cocycle
    variables: list
    relations: list
    gauge: tuple = ()  # indices of variables fixed to 1
    lookup: dict = field(default_factory=dict, repr=False)

    def var_index(self, s, t):
        return self.lookup[(s, tuple(t))]

    def names(self):
        return [v.name for v in self.variables]

    def free_indices(self):
        fixed = set(self.gauge)
        return [v.index for v in self.variables if v.index not in fixed]

    def free_names(self):
        return [self.variables[i].name for i in self.free_indices()]

    def gauge_names(self):
        return [self.variables[i].name for i in self.gauge]

    def relation_polynomial(self, rel):
        total = Polynomial()
        for (a, b), c in zip(rel.monomials, rel.coeffs):
            total = total + c * Polynomial.variable(self.variables[a].name) * Polynomial.variable(
                self.variables[b].name
            )
        return total

    def polynomials(self, simplify=False):
        """Relations with gauge-fixed variables substituted.

        With `simplify`, zero polynomials are dropped and duplicates up to
        sign removed (first occurrence kept).
        """
        fixed = {self.variables[i].name: 1 for i in self.gauge}
        polys = [self.relation_polynomial(r).substitute(fixed) for r in self.relations]
        if not simplify:
            return polys
        out, seen = [], set()
        for p in polys:
            if p.is_zero():
                continue
            q = p.normalized_sign()
            if q in seen:
                continue
            seen.add(q)
            out.append(q)
        return out

    def full_values(self, free_values):
        """Expand values for free variables into a per-variable list (gauge -> 1)."""
        vals = [1] * len(self.variables)
        for i, x in zip(self.free_indices(), free_values):
            vals[i] = x
        return vals

    def residuals(self, values):
        """Relation residuals for a full per-variable assignment."""
        out = []
        for rel in self.relations:
            r = 0
            for (a, b), c in zip(rel.monomials, rel.coeffs):
                r += c * values[a] * values[b]
            out.append(r)
        return out

    def compiled_terms(self):
        """Terms (poly index, coeff, i, j) over free-variable slots; slot m means the constant 1."""
        free = self.free_indices()
        slot = {v: k for k, v in enumerate(free)}
        m = len(free)
        terms = []
        for p, rel in enumerate(self.relations):
            for (a, b), c in zip(rel.monomials, rel.coeffs):
                terms.append((p, c, slot.get(a, m), slot.get(b, m)))
        return terms


def _point_in(alpha, i, j):
    t = list(alpha)
    t[i] += 1
    t[j] += 1
    return tuple(t)


def generate_relations(tri, n, sigma=None):
    if n < 2:
        raise ValueError("n must be at least 2")
    if sigma is None:
        sigma = Z2Cocycle.trivial(tri)
    nf = len(tri.classes.face_classes)
    if len(sigma.values) != nf or any(v not in (1, -1) for v in sigma.values):
        raise InvalidCocycle(f"expected {nf} values in {{+1, -1}}")
    if not is_cocycle(tri, sigma):
        raise InvalidCocycle("coboundary of sigma is nontrivial")
    variables = identify_variables(tri, n)
    lookup = {m: v.index for v in variables for m in v.members}
    relations = []
    for s in range(tri.simplex_count):
        sg = sigma.on_simplex(tri, s)
        s1, s2 = sg[2] * sg[3], sg[0] * sg[3]
        for alpha in subsimplices(n):
            def var(i, j):
                return lookup[(s, _point_in(alpha, i, j))]

            monos = ((var(0, 3), var(1, 2)), (var(0, 1), var(2, 3)), (var(0, 2), var(1, 3)))
            relations.append(PtolemyRelation(s, alpha, monos, (s1, s2, -1)))
    return PolynomialSystem(tri, n, sigma, variables, relations, (), lookup)


def diagonal_action_exponents(tri, n, variables=None):
    """Exponent of each diagonal entry (vertex class v, slot k = 1..n) on each variable.

    Columns are ordered (v, k) with k fastest.
    """
    if variables is None:
        variables = identify_variables(tri, n)
    nv = len(tri.classes.vertex_classes)
    rows = []
    for var in variables:
        s, t = var.representative
        row = [0] * (nv * n)
        for v in range(4):
            vc = tri.vertex_class_of(s, v)
            for k in range(t[v]):
                row[vc * n + k] += 1
        rows.append(row)
    return rows


def _det_one_projection(rows, n):
    # restrict to the subtorus with prod_k d_{v,k} = 1: columns e_{v,k} - e_{v,k+1}
    if not rows:
        return rows
    nv = len(rows[0]) // n
    out = []
    for row in rows:
        out.append([row[v * n + k] - row[v * n + k + 1] for v in range(nv) for k in range(n - 1)])
    return out


def choose_gauge(system, action=None):
    """Fix to 1 a greedy-lexicographic maximal set of variables with independent action rows."""
    if action is None:
        action = diagonal_action_exponents(system.tri, system.n, system.variables)
    rows = _det_one_projection(action, system.n)
    chosen, picked = [], []
    rank = 0
    for var in system.variables:
        trial = picked + [rows[var.index]]
        r = rational_rank(trial)
        if r > rank:
            picked, rank = trial, r
            chosen.append(var.index)
    system.gauge = tuple(chosen)
    return system


def action_rank(system, action=None):
    if action is None:
        action = diagonal_action_exponents(system.tri, system.n, system.variables)
    return rational_rank(_det_one_projection(action, system.n))


def apply_eta(system, values, eta):
    """Act by a Z/2 1-cochain (+-1 per edge class) on a per-variable assignment.

    The result solves the system for sigma * delta(eta).
    """
    out = list(values)
    for var in system.variables:
        s, t = var.representative
        sign = 1
        for i, j in EDGES:
            if eta[system.tri.edge_class_of(s, (i, j))] == -1 and (t[i] * t[j]) % 2:
                sign = -sign
        out[var.index] = sign * values[var.index]
    return out


def export_ideal(system, fmt="text"):
    """One polynomial per line plus the auxiliary nonvanishing equation."""
    if fmt in ("text", "generic-algebra-text"):
        lines = [p.to_text() for p in system.polynomials()]
        if system.gauge:
            lines = [p.to_text() for p in system.polynomials(simplify=True)]
        names = system.free_names()
        lines.append(" * ".join(names + ["t"]) + " - 1" if names else "t - 1")
        return "\n".join(lines) + "\n"
    if fmt in ("json", "structured-json"):
        return json.dumps(system_to_dict(system), indent=2, sort_keys=True)
    raise UnsupportedFormat(f"unknown export format {fmt!r}")


def system_to_dict(system):
    return {
        "schema": 1,
        "n": system.n,
        "sigma": list(system.sigma.values),
        "variables": [
            {
                "name": v.name,
                "representative": [v.representative[0], list(v.representative[1])],
                "members": [[s, list(t)] for s, t in v.members],
            }
            for v in system.variables
        ],
        "relations": [
            {
                "simplex": r.simplex,
                "alpha": list(r.alpha),
                "terms": [
                    {"coeff": c, "vars": [system.variables[a].name, system.variables[b].name]}
                    for (a, b), c in zip(r.monomials, r.coeffs)
                ],
            }
            for r in system.relations
        ],
        "gauge": system.gauge_names(),
        "polynomials": [p.to_text() for p in system.polynomials(simplify=bool(system.gauge))],
        "nonvanishing": system.free_names() + ["t"],
    }



def set_gauge(system, names):
    """Fix the named variables to 1, checking their action rows are independent."""
    action = _det_one_projection(
        diagonal_action_exponents(system.tri, system.n, system.variables), system.n
    )
    index = {v.name: v.index for v in system.variables}
    chosen = [index[name] for name in names]
    if rational_rank([action[i] for i in chosen]) != len(chosen):
        raise ValueError("gauge variables have dependent diagonal-action rows")
    system.gauge = tuple(chosen)
    return system
