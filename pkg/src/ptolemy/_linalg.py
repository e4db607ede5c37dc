"""Small exact linear algebra helpers (GF(2) and the rationals)."""

from fractions import Fraction


def gf2_rref(rows, ncols):
    """Reduced row echelon form over GF(2).

    `rows` are sequences of 0/1.  Returns (reduced rows, pivot columns);
    zero rows are dropped.
    """
    work = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                work[i] = [a ^ b for a, b in zip(work[i], work[rank])]
        pivots.append(col)
        rank += 1
    return work[:rank], pivots


def gf2_reduce(vec, basis, pivots):
    """Reduce `vec` modulo the row space spanned by an RREF basis.

    The result is zero at every pivot position, which makes it the
    lexicographically smallest element of the coset (position 0 most significant).
    """
    out = list(vec)
    for row, col in zip(basis, pivots):
        if out[col]:
            out = [a ^ b for a, b in zip(out, row)]
    return out


def gf2_nullspace(rows, ncols):
    """Basis of {x : rows @ x = 0} over GF(2)."""
    reduced, pivots = gf2_rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, p in zip(reduced, pivots):
            if row[f]:
                x[p] = 1
        basis.append(x)
    return basis


def rational_rank(rows):
    """Rank over Q of an integer (or Fraction) matrix given as a list of rows."""
    work = [[Fraction(x) for x in r] for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(work)) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        p = work[rank][col]
        for i in range(rank + 1, len(work)):
            if work[i][col] != 0:
                f = work[i][col] / p
                work[i] = [a - f * b for a, b in zip(work[i], work[rank])]
        rank += 1
    return rank
