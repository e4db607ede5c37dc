"""Sparse multivariate polynomials with rational coefficients.

Only what the package needs: building relations, substituting constants,
printing, and evaluation.  Monomials are sorted tuples of (name, exponent).
"""

from fractions import Fraction


def _mono_mul(a, b):
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted((k, v) for k, v in exps.items() if v))


def _mono_key(mono):
    # graded order: higher degree first, then by variable names
    return (-sum(e for _, e in mono), mono)


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[mono] = self.terms.get(mono, 0) + c
        self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def variable(cls, name):
        return cls({((name, 1),): 1})

    @classmethod
    def constant(cls, c):
        return cls({(): c})

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Polynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def variables(self):
        return sorted({name for m in self.terms for name, _ in m})

    def degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0]))

    def normalized_sign(self):
        """Copy scaled by +-1 so that the leading coefficient is positive."""
        terms = self.sorted_terms()
        if terms and terms[0][1] < 0:
            return -self
        return self

    def substitute(self, values):
        """Replace variables by constants (or polynomials)."""
        out = Polynomial()
        for mono, c in self.terms.items():
            term = Polynomial.constant(c)
            rest = []
            for name, e in mono:
                if name in values:
                    term = term * (_coerce(values[name]) ** e)
                else:
                    rest.append((name, e))
            out = out + term * Polynomial({tuple(rest): 1})
        return out

    def evaluate(self, values):
        total = 0
        for mono, c in self.terms.items():
            t = float(c)
            for name, e in mono:
                t = t * values[name] ** e
            total = total + t
        return total

    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for k, (mono, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = []
            for name, e in mono:
                factors.extend([name] * e)
            if mag != 1 or not factors:
                factors.insert(0, str(mag))
            body = " * ".join(factors)
            if k == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"


def _coerce(x):
    if isinstance(x, Polynomial):
        return x
    return Polynomial.constant(x)
