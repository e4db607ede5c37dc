"""Flattenings, the regulator, and complex volumes of Ptolemy cochains.

Conventions: principal logarithm with cut (-inf, 0], taking the value
``log|x| + pi*i`` on the cut.  For pSL mode the lift of a coordinate ``c``
is ``log(c**2) / 2``, which is a logarithm of ``+c`` or ``-c``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateCrossRatio, NotAFlattening
from .triangulation import EDGES

PI = math.pi
PI2 = math.pi**2
FLATTENING_TOL = 1e-10
DEGENERATE_TOL = 1e-12


def _bernoulli_numbers(count):
    b = [Fraction(0)] * (count + 1)
    b[0] = Fraction(1)
    for m in range(1, count + 1):
        b[m] = -sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return b


def _series_coeffs(count=40):
    b = _bernoulli_numbers(count)
    return [float(b[k] / math.factorial(k + 1)) for k in range(count + 1)]


_COEFFS = _series_coeffs()


def principal_log(z):
    z = complex(z)
    if z.imag == 0:
        z = complex(z.real, 0.0)  # -0.0 would select the other side of the cut
    if z == 0:
        raise DegenerateCrossRatio("logarithm of zero")
    return cmath.log(z)


def _li2_series(w):
    # Li2(w) = sum_k B_k u^(k+1)/(k+1)!  with u = -log(1-w); fine for |u| < ~1.3
    u = -principal_log(1 - w)
    total = 0j
    power = u
    for k, c in enumerate(_COEFFS):
        if c:
            total += c * power
        power *= u
        if k > 4 and abs(power) * 1e-2 < 1e-18:
            break
    return total


def dilog(z):
    """Principal branch of Li2.

    On the cut (1, inf) the value is the limit from below the real axis,
    Im Li2(x) = -pi*log(x).
    """
    z = complex(z)
    if z.imag == 0:
        z = complex(z.real, 0.0)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2 / 6)
    if abs(z) > 1:
        mz = -z
        if mz.imag == 0:
            mz = complex(mz.real, 0.0)
        return -PI2 / 6 - 0.5 * principal_log(mz) ** 2 - _dilog_unit(1 / z)
    return _dilog_unit(z)


def _dilog_unit(z):
    if z.real > 0.5:
        if z == 1:
            return complex(PI2 / 6)
        return PI2 / 6 - principal_log(z) * principal_log(1 - z) - _li2_series(1 - z)
    return _li2_series(z)


@dataclass(frozen=True)
class Flattening:
    """A pair (e, f) with exp(e) + exp(f) = 1; with `odd`, up to signs on each term."""

    e: complex
    f: complex
    odd: bool = False

    def __post_init__(self):
        object.__setattr__(self, "e", complex(self.e))
        object.__setattr__(self, "f", complex(self.f))
        self.decompose()

    def decompose(self):
        """Return (z, p, q) with e = log z + p*pi*i and f = log(1-z) + q*pi*i."""
        ee, ef = cmath.exp(self.e), cmath.exp(self.f)
        candidates = [(ee, 1)]
        if self.odd:
            candidates += [(ee, -1), (-ee, 1), (-ee, -1)]
        best = None
        for z, sf in candidates:
            err = abs(1 - z - sf * ef)
            if best is None or err < best[0]:
                best = (err, z)
        err, z = best
        scale = max(1.0, abs(ee), abs(ef))
        if err > FLATTENING_TOL * scale:
            raise NotAFlattening(
                f"exp(e) and exp(f) do not satisfy the flattening relation (error {err:.3g})"
            )
        if abs(z) < DEGENERATE_TOL or abs(1 - z) < DEGENERATE_TOL:
            raise DegenerateCrossRatio(f"cross-ratio {z} is degenerate")
        p = round(((self.e - principal_log(z)) / (PI * 1j)).real)
        q = round(((self.f - principal_log(1 - z)) / (PI * 1j)).real)
        return z, p, q

    @property
    def cross_ratio(self):
        return self.decompose()[0]

    def log_parameters(self):
        return LogParameters.of(self)


@dataclass(frozen=True)
class LogParameters:
    values: tuple  # in EDGES order: 01, 02, 03, 12, 13, 23

    @classmethod
    def of(cls, fl):
        e, f = fl.e, fl.f
        table = {(0, 1): e, (2, 3): e, (1, 2): -f, (0, 3): -f, (0, 2): -e + f, (1, 3): -e + f}
        return cls(tuple(table[edge] for edge in EDGES))

    def __getitem__(self, edge):
        return self.values[EDGES.index(tuple(sorted(edge)))]


def rogers_R(fl):
    z, p, q = fl.decompose()
    lz, l1z = principal_log(z), principal_log(1 - z)
    return dilog(z) + 0.5 * (lz + p * PI * 1j) * (l1z - q * PI * 1j) - PI2 / 6


def _edge_lookup(logs):
    if isinstance(logs, dict):
        return {tuple(sorted(k)): complex(v) for k, v in logs.items()}
    logs = list(logs)
    if len(logs) != 6:
        raise ValueError("need six lifted coordinates")
    return {edge: complex(v) for edge, v in zip(EDGES, logs)}


def flattening_of_subsimplex(logs, odd=False):
    """Flattening of a lifted Ptolemy cochain on one subsimplex.

    `logs` maps edges (i, j) to lifted coordinates, or is a sequence in the
    order 01, 02, 03, 12, 13, 23.
    """
    c = _edge_lookup(logs)
    e = c[(0, 3)] + c[(1, 2)] - c[(0, 2)] - c[(1, 3)]
    f = c[(0, 1)] + c[(2, 3)] - c[(0, 2)] - c[(1, 3)]
    return Flattening(e, f, odd)


def lift_coordinates(values, psl=False):
    """Default lifts: principal log (SL) or half the principal log of the square (pSL)."""
    if psl:
        return [0.5 * principal_log(complex(v) ** 2) for v in values]
    return [principal_log(v) for v in values]


@dataclass(frozen=True)
class ExtendedBlochElement:
    terms: tuple  # (sign, Flattening, simplex, alpha)
    odd: bool = False

    @property
    def modulus(self):
        return PI2 if self.odd else 4 * PI2

    def flattenings(self):
        return [(sign, fl) for sign, fl, _, _ in self.terms]

    def regulator(self):
        """Sum of sign * R, unreduced."""
        return sum(sign * rogers_R(fl) for sign, fl, _, _ in self.terms)

    def __len__(self):
        return len(self.terms)


def _subsimplex_logs(system, logs, s, alpha):
    out = {}
    for i, j in EDGES:
        t = list(alpha)
        t[i] += 1
        t[j] += 1
        out[(i, j)] = logs[system.var_index(s, t)]
    return out


def _resolve(system, values, psl, logs):
    if psl is None:
        psl = not system.sigma.is_trivial()
    if logs is None:
        logs = lift_coordinates(values, psl)
    return psl, logs


def lambda_element(system, values, psl=None, logs=None):
    """Signed sum of subsimplex flattenings for a full per-variable assignment.

    pSL mode (odd flattenings) is selected automatically for nontrivial sigma.
    Custom lifts may be passed as `logs`, one per variable; they must
    exponentiate to the values (up to sign in pSL mode).
    """
    from .variety import subsimplices

    psl, logs = _resolve(system, values, psl, logs)
    terms = []
    tri = system.tri
    for s in range(tri.simplex_count):
        for alpha in subsimplices(system.n):
            fl = flattening_of_subsimplex(_subsimplex_logs(system, logs, s, alpha), psl)
            terms.append((tri.signs[s], fl, s, alpha))
    return ExtendedBlochElement(tuple(terms), psl)


def edge_log_sums(system, values, psl=None, logs=None):
    """Signed sum of log-parameters around every edge point; each should vanish.

    Returns a list of (variable name, sum), one entry per edge-point variable.
    """
    psl, logs = _resolve(system, values, psl, logs)
    tri = system.tri
    cache = {}
    out = []
    for var in system.variables:
        support = [i for i, x in enumerate(var.point) if x]
        if len(support) != 2:
            continue
        total = 0j
        for s, t in var.members:
            a, b = [i for i, x in enumerate(t) if x]
            alpha = list(t)
            alpha[a] -= 1
            alpha[b] -= 1
            key = (s, tuple(alpha))
            if key not in cache:
                cache[key] = LogParameters.of(
                    flattening_of_subsimplex(_subsimplex_logs(system, logs, s, alpha), psl)
                )
            total += tri.signs[s] * cache[key][(a, b)]
        out.append((var.name, total))
    return out


def reduce_real(x, modulus):
    """Reduce the real part of x into (-modulus/2, modulus/2]."""
    x = complex(x)
    r = x.real - modulus * math.floor(x.real / modulus + 0.5)
    if r <= -modulus / 2:
        r += modulus
    return complex(r, x.imag)


@dataclass(frozen=True)
class ComplexVolumeClass:
    """Vol + i*CS, with CS (the imaginary part) defined modulo `modulus`."""

    value: complex
    modulus: float

    @property
    def volume(self):
        return self.value.real

    @property
    def chern_simons(self):
        return self.value.imag

    @property
    def i_vol(self):
        return 1j * self.value

    def distance(self, other):
        """Distance to a complex number, taking the imaginary part modulo `modulus`."""
        d = complex(other) - self.value
        im = d.imag - self.modulus * round(d.imag / self.modulus)
        return math.hypot(d.real, im)


def complex_volume(el):
    s = reduce_real(el.regulator(), el.modulus)
    return ComplexVolumeClass(-1j * s, el.modulus)


def lift_perturbation_spread(system, values, trials=20, seed=0, psl=None, max_shift=3):
    """Largest change of the reduced regulator over random alternative lifts.

    Each trial shifts every lifted coordinate by an independent multiple of
    pi*i (pSL) or 2*pi*i (SL); identified points share a lift by construction.
    """
    import random

    psl, logs = _resolve(system, values, psl, None)
    el = lambda_element(system, values, psl=psl, logs=logs)
    base = el.regulator()
    step = PI * 1j if psl else 2 * PI * 1j
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(trials):
        shifted = [v + rng.randint(-max_shift, max_shift) * step for v in logs]
        other = lambda_element(system, values, psl=psl, logs=shifted).regulator()
        worst = max(worst, abs(reduce_real(other - base, el.modulus)))
    return worst
