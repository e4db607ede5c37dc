"""Integer relations among real numbers by lattice reduction.

Values may be given as floats, strings or Decimals; strings keep their
stated number of digits, which is what the precision check uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .errors import PrecisionInsufficient

LLL_DELTA = Fraction(99, 100)
MAX_DIMENSION = 8
DEFAULT_SCALE = 10**12
PI2_DENOMINATORS = (1, 2, 3, 4, 6, 12, 15)


def _exact(value):
    """(Fraction value, absolute quantum of the input)."""
    if isinstance(value, str):
        value = Decimal(value.strip())
    if isinstance(value, Decimal):
        exp = value.as_tuple().exponent
        return Fraction(value), Fraction(10) ** exp
    if isinstance(value, int):
        return Fraction(value), Fraction(0)
    x = float(value)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {value!r}")
    return Fraction(x), Fraction(math.ulp(x))


@dataclass(frozen=True)
class RelationQuery:
    target: object
    basis: tuple
    bound: int = 1000
    scale: int = DEFAULT_SCALE

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if not self.basis:
            raise ValueError("basis must be nonempty")
        if len(self.basis) + 1 > MAX_DIMENSION:
            raise ValueError(f"at most {MAX_DIMENSION - 1} basis values")
        if self.bound < 1 or self.scale < 1:
            raise ValueError("bound and scale must be positive")

    def values(self):
        return (self.target,) + self.basis


def lll_reduce(rows, delta=LLL_DELTA):
    """LLL-reduce integer row vectors (exact rational Gram-Schmidt)."""
    b = [list(r) for r in rows]
    n = len(b)
    if n == 0:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gram_schmidt():
        bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
        norms = []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = dot(b[i], bstar[j]) / norms[j] if norms[j] else Fraction(0)
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(dot(v, v))
        return mu, norms

    mu, norms = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                mu, norms = gram_schmidt()
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, norms = gram_schmidt()
            k = max(k - 1, 1)
    return b


def _residual(coeffs, values):
    return float(abs(sum(c * v for c, v in zip(coeffs, values))))


def find_integer_relation(query):
    """Integers (r0, r1, ...) with r0*target + sum r_i*basis_i ~ 0, or None.

    Inputs are normalized by their largest magnitude, so a common positive
    rescaling gives the same answer.  r0 is nonzero and positive.
    """
    exact = [_exact(v) for v in query.values()]
    values = [v for v, _ in exact]
    top = max(abs(v) for v in values)
    if top == 0:
        return (1,) + (0,) * len(query.basis)
    for v, quantum in exact:
        if quantum / top * query.scale > 1:
            raise PrecisionInsufficient(
                f"value {float(v)!r} carries too few digits for scale {query.scale:g}"
            )
    normalized = [v / top for v in values]
    dim = len(values)
    rows = []
    for i, v in enumerate(normalized):
        row = [0] * dim + [round(v * query.scale)]
        row[i] = 1
        rows.append(row)
    reduced = lll_reduce(rows)

    best = None
    for row in reduced:
        coeffs = row[:dim]
        if coeffs[0] == 0 or max(abs(c) for c in coeffs) > query.bound:
            continue
        if coeffs[0] < 0:
            coeffs = [-c for c in coeffs]
        norm = math.sqrt(sum(c * c for c in coeffs))
        if _residual(coeffs, normalized) >= 10 * norm / query.scale:
            continue
        key = (norm, coeffs)
        if best is None or key < best:
            best = key
    return tuple(best[1]) if best else None


def relation_residual(coeffs, values):
    return _residual(coeffs, [_exact(v)[0] for v in values])


@dataclass(frozen=True)
class ComplexRelation:
    """r0*target + sum r_i*basis_i = (k/d)*pi^2*i modulo modulus*i."""

    coefficients: tuple
    pi2_numerator: int
    pi2_denominator: int
    real_residual: float
    imag_residual: float

    def describe(self, names=None):
        r0, rest = self.coefficients[0], self.coefficients[1:]
        names = names or [f"b{i}" for i in range(1, len(rest) + 1)]
        parts = [f"{-c}*{nm}" for c, nm in zip(rest, names) if c]
        k, d = self.pi2_numerator, self.pi2_denominator
        if k:
            parts.append(f"{k}/{d}*pi^2*i")
        rhs = " + ".join(parts) or "0"
        return f"{r0}*target = {rhs}"


def find_complex_relation(target, basis, bound=1000, scale=DEFAULT_SCALE,
                          modulus=4 * math.pi**2, denominators=PI2_DENOMINATORS, tol=1e-7):
    """Relation on real parts, then fit the imaginary defect as a rational multiple of pi^2.

    `target` and `basis` entries are complex, or (re, im) pairs whose parts
    may be strings to carry their stated digits.
    """
    def parts(z):
        if isinstance(z, (tuple, list)):
            return z[0], z[1]
        z = complex(z)
        return z.real, z.imag

    t_re, t_im = parts(target)
    b_parts = [parts(b) for b in basis]
    coeffs = find_integer_relation(RelationQuery(t_re, tuple(re for re, _ in b_parts), bound, scale))
    if coeffs is None:
        return None
    re_values = [t_re] + [re for re, _ in b_parts]
    im_values = [t_im] + [im for _, im in b_parts]
    real_res = relation_residual(coeffs, re_values)
    im_sum = sum(c * float(_exact(v)[0]) for c, v in zip(coeffs, im_values))
    defect = im_sum - modulus * round(im_sum / modulus)
    for d in denominators:
        k = round(defect * d / math.pi**2)
        err = abs(defect - k * math.pi**2 / d)
        if err < tol:
            period = round(modulus * d / math.pi**2)
            if period:
                # smallest representative of k modulo the period
                k = (k + period // 2) % period - period // 2
            g = math.gcd(k, d) or d
            return ComplexRelation(tuple(coeffs), k // g, d // g, real_res, err)
    return None
