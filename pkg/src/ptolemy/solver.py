"""Numerical solutions of gauge-fixed Ptolemy systems.

Two routes: batched damped Newton from random starts, and substitution of
an explicit parametrization of a zero-dimensional component.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import MissingVariable, ParametrizationInconsistent

# fraction of converged starts above which distinct hits suggest a curve of solutions
POSITIVE_DIMENSION_RATIO = 0.1


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 2000
    seed: int = 0
    max_iterations: int = 200
    tol: float = 1e-12
    dedup_distance: float = 1e-6
    nonvanishing_tol: float = 1e-8
    annulus: tuple = (0.1, 3.0)

    def __post_init__(self):
        if min(self.tol, self.dedup_distance, self.nonvanishing_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.starts < 0 or self.max_iterations <= 0:
            raise ValueError("starts must be >= 0 and max_iterations > 0")
        lo, hi = self.annulus
        if not 0 <= lo < hi:
            raise ValueError("annulus radii must satisfy 0 <= inner < outer")


@dataclass(frozen=True)
class PtolemySolution:
    names: tuple
    values: tuple  # complex, one per variable; gauge-fixed entries are 1
    residual: float
    source: str = "newton"

    def as_dict(self):
        return dict(zip(self.names, self.values))

    def __getitem__(self, name):
        return self.values[self.names.index(name)]

    def to_json(self):
        return {
            "variables": {n: [v.real, v.imag] for n, v in zip(self.names, self.values)},
            "residual": self.residual,
            "source": self.source,
        }


@dataclass
class SolveResult:
    solutions: list
    starts: int
    converged: int
    warnings: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]

    def statistics(self):
        return {
            "starts": self.starts,
            "converged": self.converged,
            "distinct": len(self.solutions),
            "warnings": list(self.warnings),
        }


class _Compiled:
    """Relations as arrays of quadratic terms over the free variables.

    Slot `m` (one past the last free variable) holds the constant 1.
    """

    def __init__(self, system):
        terms = system.compiled_terms()
        self.m = len(system.free_indices())
        self.npoly = len(system.relations)
        poly = np.array([t[0] for t in terms], dtype=int)
        self.coeff = np.array([t[1] for t in terms], dtype=float)
        self.a = np.array([t[2] for t in terms], dtype=int)
        self.b = np.array([t[3] for t in terms], dtype=int)
        eye_p = np.eye(self.npoly)
        eye_v = np.eye(self.m + 1)
        self.scatter = eye_p[poly]  # terms x polys
        self.onehot_a = eye_v[self.a][:, : self.m]
        self.onehot_b = eye_v[self.b][:, : self.m]

    def _extended(self, x):
        return np.concatenate([x, np.ones(x.shape[:-1] + (1,), dtype=complex)], axis=-1)

    def residual(self, x):
        xe = self._extended(x)
        return (self.coeff * xe[..., self.a] * xe[..., self.b]) @ self.scatter

    def jacobian(self, x):
        xe = self._extended(x)
        da = self.coeff * xe[..., self.b]
        db = self.coeff * xe[..., self.a]
        return np.einsum("...t,tp,tv->...pv", da, self.scatter, self.onehot_a) + np.einsum(
            "...t,tp,tv->...pv", db, self.scatter, self.onehot_b
        )


def _sample_starts(config, m):
    lo, hi = config.annulus
    starts = np.empty((config.starts, m), dtype=complex)
    for i in range(config.starts):
        rng = np.random.default_rng([config.seed, i])
        # uniform in area on the annulus
        r = np.sqrt(rng.uniform(lo**2, hi**2, size=m))
        theta = rng.uniform(0, 2 * np.pi, size=m)
        starts[i] = r * np.exp(1j * theta)
    return starts


def _newton(compiled, x, config):
    """Damped Gauss-Newton on |F|^2 with step halving, vectorised over starts."""
    f = compiled.residual(x)
    norm = np.linalg.norm(f, axis=1)
    active = np.ones(len(x), dtype=bool)
    for _ in range(config.max_iterations):
        active &= norm > config.tol * 1e-2
        active &= np.all(np.isfinite(x), axis=1)
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        jac = compiled.jacobian(x[idx])
        step = -np.einsum("bvp,bp->bv", np.linalg.pinv(jac), f[idx])
        t = np.ones(len(idx))
        trial = x[idx] + step
        ftrial = compiled.residual(trial)
        ntrial = np.linalg.norm(ftrial, axis=1)
        for _halve in range(30):
            worse = ~(ntrial < norm[idx]) & (t > 1e-9)
            if not worse.any():
                break
            t[worse] *= 0.5
            trial[worse] = x[idx][worse] + t[worse, None] * step[worse]
            ftrial[worse] = compiled.residual(trial[worse])
            ntrial[worse] = np.linalg.norm(ftrial[worse], axis=1)
        improved = ntrial < norm[idx]
        upd = idx[improved]
        x[upd] = trial[improved]
        f[upd] = ftrial[improved]
        norm[upd] = ntrial[improved]
        # stalled starts stop
        active[idx[~improved]] = False
    return x, norm


def _solution_key(values):
    return tuple((round(v.real, 8), round(v.imag, 8)) for v in values)


def _sorted_unique(candidates, dedup):
    candidates = sorted(candidates, key=lambda s: _solution_key(s.values))
    out = []
    for s in candidates:
        v = np.array(s.values)
        if any(np.max(np.abs(v - np.array(o.values))) < dedup for o in out):
            continue
        out.append(s)
    return out


def verify_solution(system, values, tol=1e-9, nonvanishing_tol=1e-8):
    """Residual report for an assignment given as a mapping name -> value or a full list."""
    if isinstance(values, dict):
        missing = [n for n in system.names() if n not in values and n not in system.gauge_names()]
        if missing:
            raise MissingVariable(f"no value for {', '.join(missing)}")
        values = [values.get(n, 1) for n in system.names()]
    elif len(values) != len(system.variables):
        raise MissingVariable(f"expected {len(system.variables)} values, got {len(values)}")
    res = [abs(r) for r in system.residuals(values)]
    small = [system.variables[i].name for i, v in enumerate(values) if abs(v) < nonvanishing_tol]
    worst = max(res, default=0.0)
    return {
        "residuals": res,
        "max_residual": worst,
        "vanishing": small,
        "passed": worst < tol and not small,
    }


def _polish(compiled, x, iterations=8):
    x = np.array(x, dtype=complex)[None, :]
    for _ in range(iterations):
        f = compiled.residual(x)
        jac = compiled.jacobian(x)
        step = np.linalg.lstsq(jac[0], -f[0], rcond=None)[0]
        x_new = x + step
        if np.max(np.abs(compiled.residual(x_new))) <= np.max(np.abs(f)):
            x = x_new
        else:
            break
    return x[0]


def solve_newton_multistart(system, config=None):
    config = config or SolverConfig()
    compiled = _Compiled(system)
    m = compiled.m
    if m == 0:
        values = system.full_values([])
        rep = verify_solution(system, values, config.tol, config.nonvanishing_tol)
        sols = [PtolemySolution(tuple(system.names()), tuple(complex(v) for v in values), rep["max_residual"])]
        return SolveResult(sols if rep["passed"] else [], 0, int(rep["passed"]))
    x = _sample_starts(config, m)
    x, norm = _newton(compiled, x, config)
    candidates = []
    converged = 0
    for xi, ni in zip(x, norm):
        if not np.all(np.isfinite(xi)) or ni >= config.tol:
            continue
        if np.min(np.abs(xi)) < config.nonvanishing_tol:
            continue
        converged += 1
        values = tuple(complex(v) for v in system.full_values(list(xi)))
        candidates.append(PtolemySolution(tuple(system.names()), values, float(ni), "newton"))
    sols = _sorted_unique(candidates, config.dedup_distance)
    warnings = []
    if converged and len(sols) > POSITIVE_DIMENSION_RATIO * converged:
        warnings.append("suspected positive-dimensional locus")
    return SolveResult(sols, config.starts, converged, warnings)


# --- explicit parametrizations ------------------------------------------------

_TERM = re.compile(
    r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*(?:([A-Za-z_][A-Za-z_0-9]*)(?:\s*\^\s*(\d+))?)?\s*"
)


def parse_univariate(text, var=None):
    """Coefficients (highest degree first) of a rational polynomial like '1/4u^5 - 3/4u + 2'.

    Returns (coefficients as Fractions, variable name or None).
    """
    text = text.replace("**", "^").strip()
    if not text:
        raise ValueError("empty polynomial")
    pos = 0
    coeffs = {}
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        sign, num, name, exp = m.groups()
        if sign is None and not first:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        if num is None and name is None:
            raise ValueError(f"dangling sign in {text!r}")
        if name is not None:
            if var is None:
                var = name
            elif name != var:
                raise ValueError(f"polynomial mixes variables {var!r} and {name!r}")
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        deg = (int(exp) if exp else 1) if name else 0
        coeffs[deg] = coeffs.get(deg, 0) + c
        pos = m.end()
        first = False
    top = max(coeffs)
    return [coeffs.get(d, Fraction(0)) for d in range(top, -1, -1)], var


def _eval_coeffs(coeffs, u):
    acc = 0j
    for c in coeffs:
        acc = acc * u + float(c)
    return acc


def _polished_roots(coeffs):
    c = np.array([float(x) for x in coeffs])
    roots = np.roots(c)
    d = np.polyder(c)
    out = []
    for r in roots:
        for _ in range(5):
            dr = np.polyval(d, r)
            if dr == 0:
                break
            r = r - np.polyval(c, r) / dr
        out.append(complex(r))
    return out


def _check_linear(system, missing):
    unknown = set(missing)
    for rel in system.relations:
        for a, b in rel.monomials:
            if a in unknown and b in unknown:
                names = ", ".join(system.variables[i].name for i in sorted(unknown))
                raise MissingVariable(f"parametrization lacks {names}, which are not linearly determined")


def _solve_linear_rest(system, values, missing):
    """Least-squares values for unlisted variables that enter every relation linearly."""
    col = {v: k for k, v in enumerate(missing)}
    mat = np.zeros((len(system.relations), len(missing)), dtype=complex)
    rhs = np.zeros(len(system.relations), dtype=complex)
    for p, rel in enumerate(system.relations):
        for (a, b), c in zip(rel.monomials, rel.coeffs):
            if a in col:
                mat[p, col[a]] += c * values[b]
            elif b in col:
                mat[p, col[b]] += c * values[a]
            else:
                rhs[p] -= c * values[a] * values[b]
    sol = np.linalg.lstsq(mat, rhs, rcond=None)[0]
    out = list(values)
    for v, k in col.items():
        out[v] = complex(sol[k])
    return out


def substitute_component(system, parametrization, minimal_polynomial, tol=1e-9, polish=True):
    """Solutions from a parametrized component, one per root of the minimal polynomial.

    `parametrization` maps variable names to polynomial strings (or numbers)
    in a single parameter.  Unlisted variables are either gauge-fixed or
    solved for, provided no relation multiplies two of them together.  Each
    root is substituted, optionally polished by Newton on the full system,
    and verified.
    """
    poly, param = parse_univariate(minimal_polynomial)
    if len(poly) < 2:
        raise ParametrizationInconsistent("minimal polynomial must have positive degree")
    if param is None:
        raise ParametrizationInconsistent("minimal polynomial has no variable")
    gauge = set(system.gauge_names())
    parsed = {}
    for name, expr in parametrization.items():
        if name not in system.names():
            raise MissingVariable(f"unknown variable {name!r}")
        coeffs, v = parse_univariate(str(expr), param)
        parsed[name] = coeffs
    names = system.names()
    missing = [names.index(n) for n in names if n not in parsed and n not in gauge]
    if missing:
        _check_linear(system, missing)
    compiled = _Compiled(system)
    free = system.free_names()
    out = []
    for u in _polished_roots(poly):
        values = [complex(_eval_coeffs(parsed[n], u)) if n in parsed else 1.0 + 0j for n in names]
        if missing:
            values = _solve_linear_rest(system, values, missing)
        for n in gauge:
            if n in parsed and abs(values[system.names().index(n)] - 1) > tol:
                raise ParametrizationInconsistent(f"{n} is gauge-fixed to 1 but the parametrization disagrees")
        rep = verify_solution(system, values, tol)
        if not rep["passed"]:
            raise ParametrizationInconsistent(
                f"root u = {u:.6g} leaves residual {rep['max_residual']:.3g}"
            )
        if polish and free:
            x = np.array([values[system.names().index(n)] for n in free])
            x = _polish(compiled, x)
            values = [complex(v) for v in system.full_values(list(x))]
            rep = verify_solution(system, values, tol)
        out.append(PtolemySolution(tuple(system.names()), tuple(values), rep["max_residual"], "substituted"))
    return sorted(out, key=lambda s: _solution_key(s.values))
