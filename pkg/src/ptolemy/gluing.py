"""Shapes of simplices from level-2 Ptolemy solutions and Thurston's gluing equations.

Edge positions carry shape parameters in opposite pairs:
01 and 23 carry z, 03 and 12 carry z' = 1/(1-z), 02 and 13 carry z'' = 1 - 1/z.
This is the pairing under which the log-parameters of a Ptolemy cochain
exponentiate to the shape parameters (up to sign on 02/13); the alternate
pairing with z' and z'' swapped fails the edge equations on 5_2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateShape, UnknownCurveLabel
from .triangulation import EDGES

SHAPE_TOL = 1e-8
EQUATION_TOL = 1e-9

# edge -> slot in (z, z', z'')
EDGE_PARAMETER = {(0, 1): 0, (2, 3): 0, (0, 3): 1, (1, 2): 1, (0, 2): 2, (1, 3): 2}


def shape_triple(z):
    z = complex(z)
    for w in (z, 1 - z):
        if abs(w) < SHAPE_TOL:
            raise DegenerateShape(f"shape {z} is too close to 0 or 1")
    zp = 1 / (1 - z)
    zpp = 1 - 1 / z
    for w in (zp, zpp):
        if abs(w) < SHAPE_TOL or abs(1 - w) < SHAPE_TOL:
            raise DegenerateShape(f"shape {z} has a degenerate companion")
    return z, zp, zpp


@dataclass(frozen=True)
class ShapeAssignment:
    shapes: tuple

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(complex(z) for z in self.shapes))
        for z in self.shapes:
            shape_triple(z)

    def __len__(self):
        return len(self.shapes)

    def triple(self, s):
        return shape_triple(self.shapes[s])

    def parameter(self, s, edge):
        return self.triple(s)[EDGE_PARAMETER[tuple(sorted(edge))]]


@dataclass(frozen=True)
class GluingEquation:
    kind: str  # "edge" or "cusp"
    terms: tuple  # (simplex, a, b, c): exponents on z, z', z''
    label: str = ""

    def degree(self):
        return sum(abs(a) + abs(b) + abs(c) for _, a, b, c in self.terms)


def cross_ratio(c03, c12, c02, c13):
    den = complex(c02) * complex(c13)
    if den == 0:
        raise DegenerateShape("zero denominator in cross-ratio")
    return complex(c03) * complex(c12) / den


def cross_ratios(system, values):
    """z_s = c03 c12 / (c02 c13) on every simplex of a level-2 solution."""
    if system.n != 2:
        raise ValueError("cross-ratios are defined for level-2 solutions")

    def c(s, i, j):
        t = [0, 0, 0, 0]
        t[i] += 1
        t[j] += 1
        return values[system.var_index(s, t)]

    shapes = []
    for s in range(system.tri.simplex_count):
        shapes.append(cross_ratio(c(s, 0, 3), c(s, 1, 2), c(s, 0, 2), c(s, 1, 3)))
    return ShapeAssignment(tuple(shapes))


def edge_equations(tri):
    eqs = []
    for k, members in enumerate(tri.classes.edge_classes):
        acc = {}
        for s, edge in members:
            row = acc.setdefault(s, [0, 0, 0])
            row[EDGE_PARAMETER[tuple(sorted(edge))]] += 1
        terms = tuple((s, *row) for s, row in sorted(acc.items()))
        eqs.append(GluingEquation("edge", terms, f"E{k}"))
    return eqs


def cusp_equations(tri):
    return [GluingEquation("cusp", tuple(c.terms), c.label) for c in tri.curves]


def equation_product(eq, shapes, signs):
    total = 1 + 0j
    for s, a, b, c in eq.terms:
        z, zp, zpp = shapes.triple(s)
        e = signs[s]
        total *= z ** (e * a) * zp ** (e * b) * zpp ** (e * c)
    return total


def evaluate_equations(eqs, shapes, signs, tol=EQUATION_TOL):
    """Products per equation (each shape parameter raised to the orientation sign)."""
    products = [equation_product(eq, shapes, signs) for eq in eqs]
    return {
        "products": products,
        "errors": [abs(p - 1) for p in products],
        "passed": all(abs(p - 1) < tol for p in products),
    }


def cusp_equation_eval(tri, label, shapes):
    if label is None:
        return 1 + 0j
    curve = tri.curve(label)
    if curve is None:
        raise UnknownCurveLabel(f"no curve labelled {label!r}")
    return equation_product(GluingEquation("cusp", tuple(curve.terms), label), shapes, tri.signs)
