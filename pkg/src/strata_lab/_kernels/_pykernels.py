"""Pure-Python implementations of the integer kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them line for
line with machine integers and falls back here on overflow.
"""

from math import gcd


def _primitive(row):
    g = 0
    for a in row:
        if a:
            g = gcd(g, a)
            if g == 1:
                return row
    if g > 1:
        return [a // g for a in row]
    return row


def rref_int(rows, ncols):
    """Fraction-free Gauss-Jordan elimination on integer rows.

    Returns ``(reduced_rows, pivots)``: each reduced row is primitive with a
    positive pivot entry, and every pivot column is zero outside its row.
    Dividing each row by its pivot entry gives the RREF over Q.
    """
    work = [list(r) for r in rows if any(r)]
    pivots = []
    rank = 0
    nrows = len(work)
    for c in range(ncols):
        if rank == nrows:
            break
        best = -1
        for i in range(rank, nrows):
            a = work[i][c]
            if a and (best < 0 or abs(a) < abs(work[best][c])):
                best = i
        if best < 0:
            continue
        work[rank], work[best] = work[best], work[rank]
        prow = work[rank]
        p = prow[c]
        for i in range(nrows):
            if i == rank:
                continue
            q = work[i][c]
            if not q:
                continue
            g = gcd(p, q)
            pm, qm = p // g, q // g
            row = work[i]
            work[i] = _primitive([pm * a - qm * b for a, b in zip(row, prow)])
        pivots.append(c)
        rank += 1
    out = []
    for i, c in enumerate(pivots):
        row = _primitive(work[i])
        if row[c] < 0:
            row = [-a for a in row]
        out.append(row)
    return out, pivots


class IntegerAction:
    """A list of rational matrices stored as integer numerators over one
    denominator each, for fast fixed-point tests on integer vectors."""

    def __init__(self, numerators, denominators, dim):
        self.dim = dim
        self.order = len(numerators)
        self._mats = [list(m) for m in numerators]
        self._dens = list(denominators)

    def fixes(self, index, x):
        n = self.dim
        m = self._mats[index]
        d = self._dens[index]
        for i in range(n):
            s = 0
            base = i * n
            for j in range(n):
                s += m[base + j] * x[j]
            if s != d * x[i]:
                return False
        return True

    def stabilizer(self, x):
        """Indices of all matrices fixing the integer vector ``x``."""
        return [g for g in range(self.order) if self.fixes(g, x)]

    def stabilizers(self, points):
        return [self.stabilizer(x) for x in points]
