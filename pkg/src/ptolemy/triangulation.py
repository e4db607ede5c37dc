"""Ordered 3-cycles: parsing, cell structure, orientation and H^2(K; Z/2).

A triangulation is a list of ordered 3-simplices whose faces are glued in
pairs.  Face `f` of a simplex is the face opposite vertex `f`; a gluing
``(s, f) -> (s', f')`` identifies the two faces by the unique map that
sends ``f`` to ``f'`` and preserves the order of the remaining vertices.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from ._linalg import gf2_nullspace, gf2_reduce, gf2_rref
from .errors import (
    H2TooLarge,
    MalformedInput,
    NonInvolutiveGluing,
    NonOrderPreservingMap,
    NonOrientable,
    ParityViolation,
    UnglueedFace,
)

EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
DEFAULT_H2_CAP = 2**16


def face_vertices(f):
    return tuple(v for v in range(4) if v != f)


def order_preserving_map(f, g):
    """Vertex map of the order-preserving face identification f -> g."""
    perm = [0] * 4
    perm[f] = g
    for a, b in zip(face_vertices(f), face_vertices(g)):
        perm[a] = b
    return tuple(perm)


@dataclass(frozen=True)
class Curve:
    """Peripheral curve data: (simplex, a, b, c) = exponents of z, z', z''."""

    label: str
    terms: tuple = ()


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smallest element as root
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self):
        groups = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return sorted(tuple(sorted(g)) for g in groups.values())


@dataclass(frozen=True)
class CellClasses:
    """Partitions of simplex vertices, edges and faces under the gluing.

    Each class is a sorted tuple; its first member is the canonical
    representative and classes are listed in order of representatives.
    Edges are written ``(s, (i, j))`` with ``i < j``.
    """

    vertex_classes: tuple
    edge_classes: tuple
    face_classes: tuple
    vertex_index: dict = field(repr=False, compare=False)
    edge_index: dict = field(repr=False, compare=False)
    face_index: dict = field(repr=False, compare=False)

    def counts(self):
        return {
            "vertices": len(self.vertex_classes),
            "edges": len(self.edge_classes),
            "faces": len(self.face_classes),
        }


@dataclass(frozen=True)
class Triangulation:
    simplex_count: int
    gluings: tuple  # gluings[s][f] == (s', f')
    signs: tuple
    name: str = ""
    curves: tuple = ()

    @classmethod
    def create(cls, gluings, signs=None, name="", curves=()):
        """Validate gluing data and build a triangulation.

        Missing signs are computed by propagation; supplied signs are checked.
        """
        gluings = tuple(tuple((int(a), int(b)) for a, b in row) for row in gluings)
        _validate_gluings(gluings)
        signs = _propagate_signs(gluings, signs)
        return cls(len(gluings), gluings, signs, name, tuple(curves))

    def vertex_map(self, s, f):
        _, g = self.gluings[s][f]
        return order_preserving_map(f, g)

    def glue_point(self, s, t):
        """Images of a point of simplex `s` (coordinates `t`) across the faces it lies on."""
        out = []
        for f in range(4):
            if t[f] != 0:
                continue
            s2, g = self.gluings[s][f]
            perm = order_preserving_map(f, g)
            t2 = [0] * 4
            for v in range(4):
                t2[perm[v]] = t[v]
            out.append((s2, tuple(t2)))
        return out

    @cached_property
    def classes(self):
        return cell_classes(self)

    def face_class_of(self, s, f):
        return self.classes.face_index[(s, f)]

    def edge_class_of(self, s, edge):
        return self.classes.edge_index[(s, tuple(sorted(edge)))]

    def vertex_class_of(self, s, v):
        return self.classes.vertex_index[(s, v)]

    def curve(self, label):
        for c in self.curves:
            if c.label == label:
                return c
        return None

    def to_text(self):
        lines = [f"tri {self.name or 'unnamed'} {self.simplex_count}"]
        for s, row in enumerate(self.gluings):
            for f, (s2, f2) in enumerate(row):
                lines.append(f"g {s} {f} {s2} {f2}")
        lines.append("signs " + " ".join(f"{e:+d}" for e in self.signs))
        for c in self.curves:
            lines.append(f"curve {c.label}")
            for term in c.terms:
                lines.append("term " + " ".join(str(x) for x in term))
        return "\n".join(lines) + "\n"


def _validate_gluings(gluings):
    if not gluings:
        raise MalformedInput("triangulation has no simplices")
    count = len(gluings)
    for s, row in enumerate(gluings):
        if len(row) != 4:
            raise UnglueedFace(f"simplex {s} has {len(row)} glued faces, expected 4")
        for f, (s2, f2) in enumerate(row):
            if not (0 <= s2 < count and 0 <= f2 < 4):
                raise MalformedInput(f"gluing of ({s}, {f}) points to ({s2}, {f2})")
            if (s2, f2) == (s, f):
                raise NonInvolutiveGluing(f"face ({s}, {f}) is glued to itself")
            if gluings[s2][f2] != (s, f):
                raise NonInvolutiveGluing(
                    f"({s}, {f}) -> ({s2}, {f2}) but ({s2}, {f2}) -> {gluings[s2][f2]}"
                )


def _required_sign_product(f, g):
    # eps_s * (-1)^f == -eps_s' * (-1)^g for an orientation-reversing face pairing
    return -((-1) ** (f + g))


def _propagate_signs(gluings, supplied=None):
    count = len(gluings)
    signs = [0] * count
    for start in range(count):
        if signs[start]:
            continue
        signs[start] = 1
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for f, (s2, f2) in enumerate(gluings[s]):
                want = signs[s] * _required_sign_product(f, f2)
                if signs[s2] == 0:
                    signs[s2] = want
                    queue.append(s2)
                elif signs[s2] != want:
                    raise NonOrientable(
                        f"no consistent orientation across gluing ({s}, {f}) -> ({s2}, {f2})"
                    )
    if supplied is None:
        return tuple(signs)
    supplied = tuple(int(e) for e in supplied)
    if len(supplied) != count or any(e not in (1, -1) for e in supplied):
        raise MalformedInput(f"signs must be {count} values in {{+1, -1}}")
    for s, row in enumerate(gluings):
        for f, (s2, f2) in enumerate(row):
            if supplied[s] * supplied[s2] != _required_sign_product(f, f2):
                raise NonOrientable(
                    f"supplied signs disagree with gluing ({s}, {f}) -> ({s2}, {f2})"
                )
    return supplied


def cell_classes(tri):
    n = tri.simplex_count
    verts = _UnionFind([(s, v) for s in range(n) for v in range(4)])
    edges = _UnionFind([(s, e) for s in range(n) for e in EDGES])
    faces = _UnionFind([(s, f) for s in range(n) for f in range(4)])
    for s in range(n):
        for f in range(4):
            s2, g = tri.gluings[s][f]
            perm = order_preserving_map(f, g)
            faces.union((s, f), (s2, g))
            for v in face_vertices(f):
                verts.union((s, v), (s2, perm[v]))
            for i, j in EDGES:
                if f in (i, j):
                    continue
                edges.union((s, (i, j)), (s2, tuple(sorted((perm[i], perm[j])))))
    vc, ec, fc = verts.classes(), edges.classes(), faces.classes()

    def index(classes):
        return {m: k for k, c in enumerate(classes) for m in c}

    return CellClasses(tuple(vc), tuple(ec), tuple(fc), index(vc), index(ec), index(fc))


def orientation_signs(tri):
    """Recompute (and thereby check) a consistent orientation sign per simplex."""
    return _propagate_signs(tri.gluings, tri.signs)


def check_edge_parity(tri):
    """Count 02/13 incidences around each edge class; each count must be even."""
    counts = []
    for k, members in enumerate(tri.classes.edge_classes):
        c = sum(1 for _, e in members if e in ((0, 2), (1, 3)))
        if c % 2:
            raise ParityViolation(f"edge class {k} has {c} incidences at positions 02/13")
        counts.append(c)
    return tuple(counts)


@dataclass(frozen=True)
class Z2Cocycle:
    """A Z/2 cochain on face classes, stored multiplicatively (+1 / -1)."""

    values: tuple
    degree: int = 2

    @classmethod
    def trivial(cls, tri):
        return cls((1,) * len(tri.classes.face_classes))

    @classmethod
    def from_bits(cls, bits):
        return cls(tuple(-1 if b else 1 for b in bits))

    @property
    def bits(self):
        return tuple(0 if v == 1 else 1 for v in self.values)

    def is_trivial(self):
        return all(v == 1 for v in self.values)

    def __mul__(self, other):
        return Z2Cocycle(tuple(a * b for a, b in zip(self.values, other.values)), self.degree)

    def on_simplex(self, tri, s):
        """(sigma_0, ..., sigma_3): values on the faces opposite each vertex."""
        return tuple(self.values[tri.face_class_of(s, f)] for f in range(4))


def coboundary_matrices(tri):
    """GF(2) matrices of delta^1 (faces x edges) and delta^2 (simplices x faces)."""
    cc = tri.classes
    ne, nf = len(cc.edge_classes), len(cc.face_classes)
    d1 = [[0] * ne for _ in range(nf)]
    for k, members in enumerate(cc.face_classes):
        s, f = members[0]
        for i, j in EDGES:
            if f not in (i, j):
                d1[k][cc.edge_index[(s, (i, j))]] ^= 1
    d2 = [[0] * nf for _ in range(tri.simplex_count)]
    for s in range(tri.simplex_count):
        for f in range(4):
            d2[s][cc.face_index[(s, f)]] ^= 1
    return d1, d2


def is_cocycle(tri, sigma):
    _, d2 = coboundary_matrices(tri)
    bits = sigma.bits
    return all(sum(a & b for a, b in zip(row, bits)) % 2 == 0 for row in d2)


def coboundary(tri, eta):
    """delta(eta) for a 1-cochain given as +-1 per edge class."""
    d1, _ = coboundary_matrices(tri)
    ebits = [0 if v == 1 else 1 for v in eta]
    return Z2Cocycle.from_bits(
        [sum(a & b for a, b in zip(row, ebits)) % 2 for row in d1]
    )


def _coboundary_basis(tri):
    d1, _ = coboundary_matrices(tri)
    nf = len(tri.classes.face_classes)
    images = [[row[c] for row in d1] for c in range(len(tri.classes.edge_classes))]
    return gf2_rref(images, nf)


def is_coboundary(tri, sigma):
    basis, pivots = _coboundary_basis(tri)
    return not any(gf2_reduce(sigma.bits, basis, pivots))


def canonical_representative(tri, sigma):
    """Lexicographically least cocycle cohomologous to `sigma`."""
    basis, pivots = _coboundary_basis(tri)
    return Z2Cocycle.from_bits(gf2_reduce(sigma.bits, basis, pivots))


def enumerate_h2(tri, cap=DEFAULT_H2_CAP):
    """One representative per class of H^2(K; Z/2), trivial class first."""
    _, d2 = coboundary_matrices(tri)
    nf = len(tri.classes.face_classes)
    cocycles = gf2_nullspace(d2, nf)
    bbasis, bpivots = _coboundary_basis(tri)
    # extend a basis of B^2 by cocycles to get generators of H^2
    span, span_piv = list(bbasis), list(bpivots)
    generators = []
    for z in cocycles:
        if any(gf2_reduce(z, span, span_piv)):
            generators.append(z)
            span, span_piv = gf2_rref(span + [z], nf)
    size = 2 ** len(generators)
    if size > cap:
        raise H2TooLarge(f"|H^2| = {size} exceeds cap {cap}")
    reps = set()
    for choice in itertools.product((0, 1), repeat=len(generators)):
        v = [0] * nf
        for bit, g in zip(choice, generators):
            if bit:
                v = [a ^ b for a, b in zip(v, g)]
        reps.add(tuple(gf2_reduce(v, bbasis, bpivots)))
    return [Z2Cocycle.from_bits(r) for r in sorted(reps)]


def parse_triangulation(text):
    """Parse the line-oriented triangulation format (see README)."""
    name, count = None, None
    glue = {}
    signs = None
    curves = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        try:
            if head == "tri":
                if name is not None or len(tok) != 3:
                    raise MalformedInput(f"line {lineno}: bad header")
                name, count = tok[1], int(tok[2])
                if count <= 0:
                    raise MalformedInput(f"line {lineno}: simplex count must be positive")
            elif name is None:
                raise MalformedInput(f"line {lineno}: expected 'tri <name> <count>' header first")
            elif head == "g":
                if len(tok) not in (5, 6):
                    raise MalformedInput(f"line {lineno}: expected 'g s f s2 f2 [perm]'")
                s, f, s2, f2 = (int(x) for x in tok[1:5])
                if not (0 <= s < count and 0 <= f < 4):
                    raise MalformedInput(f"line {lineno}: face ({s}, {f}) out of range")
                if (s, f) in glue:
                    raise MalformedInput(f"line {lineno}: face ({s}, {f}) glued twice")
                if len(tok) == 6:
                    perm = tuple(int(ch) for ch in tok[5])
                    if len(perm) != 4 or perm != order_preserving_map(f, f2):
                        raise NonOrderPreservingMap(
                            f"simplex {s} face {f}: vertex map {tok[5]} is not the "
                            f"order-preserving map to face {f2}"
                        )
                glue[(s, f)] = (s2, f2)
            elif head == "signs":
                signs = tuple(int(x) for x in tok[1:])
            elif head == "curve":
                if len(tok) != 2:
                    raise MalformedInput(f"line {lineno}: expected 'curve <label>'")
                current = [tok[1], []]
                curves.append(current)
            elif head == "term":
                if current is None or len(tok) != 5:
                    raise MalformedInput(f"line {lineno}: 'term' needs a preceding curve and 4 integers")
                current[1].append(tuple(int(x) for x in tok[1:]))
            else:
                raise MalformedInput(f"line {lineno}: unknown record {head!r}")
        except ValueError as exc:
            raise MalformedInput(f"line {lineno}: {exc}") from None
    if name is None:
        raise MalformedInput("missing 'tri' header")
    rows = []
    for s in range(count):
        row = []
        for f in range(4):
            if (s, f) not in glue:
                raise UnglueedFace(f"simplex {s} face {f} is not glued")
            row.append(glue[(s, f)])
        rows.append(row)
    for s, _ in glue:
        if s >= count:
            raise MalformedInput(f"simplex {s} out of range")
    for c in curves:
        for term in c[1]:
            if not 0 <= term[0] < count:
                raise MalformedInput(f"curve {c[0]}: simplex {term[0]} out of range")
    return Triangulation.create(
        rows, signs, name, tuple(Curve(lbl, tuple(terms)) for lbl, terms in curves)
    )


def load_triangulation(path):
    with open(path, encoding="utf-8") as fh:
        return parse_triangulation(fh.read())
