# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the integer kernels in ``_pykernels``.

Arithmetic is done in 64-bit integers with overflow detection; any overflow
raises ``OverflowError`` and the caller retries with the Python version.
"""

from libc.stdlib cimport malloc, free


cdef extern from *:
    """
    static inline int sl_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int sl_sub(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    static inline int sl_add(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    """
    int sl_mul(long long a, long long b, long long *r) nogil
    int sl_sub(long long a, long long b, long long *r) nogil
    int sl_add(long long a, long long b, long long *r) nogil


cdef inline long long _gcd(long long a, long long b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline long long _llabs(long long a) nogil:
    return -a if a < 0 else a


cdef void _make_primitive(long long *row, int n) nogil:
    cdef long long g = 0
    cdef int j
    for j in range(n):
        if row[j]:
            g = _gcd(g, row[j])
            if g == 1:
                return
    if g > 1:
        for j in range(n):
            row[j] //= g


cdef int _rref(long long *m, int nrows, int ncols, int *pivots) nogil:
    """Returns rank, or -1 on overflow."""
    cdef int rank = 0, c, i, j, best
    cdef long long p, q, g, pm, qm, t1, t2, tmp
    cdef long long *prow
    cdef long long *row
    for c in range(ncols):
        if rank == nrows:
            break
        best = -1
        for i in range(rank, nrows):
            tmp = m[i * ncols + c]
            if tmp and (best < 0 or _llabs(tmp) < _llabs(m[best * ncols + c])):
                best = i
        if best < 0:
            continue
        if best != rank:
            for j in range(ncols):
                tmp = m[rank * ncols + j]
                m[rank * ncols + j] = m[best * ncols + j]
                m[best * ncols + j] = tmp
        prow = m + rank * ncols
        p = prow[c]
        for i in range(nrows):
            if i == rank:
                continue
            row = m + i * ncols
            q = row[c]
            if not q:
                continue
            g = _gcd(p, q)
            pm = p // g
            qm = q // g
            for j in range(ncols):
                if sl_mul(pm, row[j], &t1) or sl_mul(qm, prow[j], &t2) or sl_sub(t1, t2, &row[j]):
                    return -1
            _make_primitive(row, ncols)
        pivots[rank] = c
        rank += 1
    for i in range(rank):
        row = m + i * ncols
        _make_primitive(row, ncols)
        if row[pivots[i]] < 0:
            for j in range(ncols):
                row[j] = -row[j]
    return rank


def rref_int(rows, int ncols):
    """Same contract as ``_pykernels.rref_int``; raises OverflowError when
    64-bit intermediates are not enough."""
    nonzero = [r for r in rows if any(r)]
    cdef int nrows = len(nonzero)
    cdef int i, j, rank
    if nrows == 0 or ncols == 0:
        return [], []
    cdef long long *m = <long long *> malloc(nrows * ncols * sizeof(long long))
    cdef int *piv = <int *> malloc(ncols * sizeof(int))
    if m == NULL or piv == NULL:
        free(m)
        free(piv)
        raise MemoryError()
    try:
        for i in range(nrows):
            r = nonzero[i]
            for j in range(ncols):
                m[i * ncols + j] = r[j]
        rank = _rref(m, nrows, ncols, piv)
        if rank < 0:
            raise OverflowError("64-bit elimination overflow")
        out = [[m[i * ncols + j] for j in range(ncols)] for i in range(rank)]
        pivots = [piv[i] for i in range(rank)]
        return out, pivots
    finally:
        free(m)
        free(piv)


cdef class IntegerAction:
    """Matrices stored as 64-bit numerators over one denominator each."""

    cdef long long *_mats
    cdef long long *_dens
    cdef public int dim
    cdef public int order

    def __cinit__(self, numerators, denominators, int dim):
        self.dim = dim
        self.order = len(numerators)
        self._mats = <long long *> malloc(max(1, self.order * dim * dim) * sizeof(long long))
        self._dens = <long long *> malloc(max(1, self.order) * sizeof(long long))
        if self._mats == NULL or self._dens == NULL:
            raise MemoryError()
        cdef int g, k
        for g in range(self.order):
            m = numerators[g]
            for k in range(dim * dim):
                self._mats[g * dim * dim + k] = m[k]
            self._dens[g] = denominators[g]

    def __dealloc__(self):
        free(self._mats)
        free(self._dens)

    cdef int _fixes(self, int index, long long *x) nogil:
        """1 if fixed, 0 if not, -1 on overflow."""
        cdef int n = self.dim, i, j
        cdef long long s, t, dx
        cdef long long *m = self._mats + index * n * n
        for i in range(n):
            s = 0
            for j in range(n):
                if sl_mul(m[i * n + j], x[j], &t) or sl_add(s, t, &s):
                    return -1
            if sl_mul(self._dens[index], x[i], &dx):
                return -1
            if s != dx:
                return 0
        return 1

    def fixes(self, int index, x):
        cdef long long buf[64]
        cdef int j, r
        if self.dim > 64:
            raise OverflowError("dimension too large for compiled kernel")
        for j in range(self.dim):
            buf[j] = x[j]
        r = self._fixes(index, buf)
        if r < 0:
            raise OverflowError("64-bit overflow in fixed-point test")
        return r == 1

    def stabilizer(self, x):
        cdef long long buf[64]
        cdef int j, g, r
        if self.dim > 64:
            raise OverflowError("dimension too large for compiled kernel")
        for j in range(self.dim):
            buf[j] = x[j]
        out = []
        for g in range(self.order):
            r = self._fixes(g, buf)
            if r < 0:
                raise OverflowError("64-bit overflow in fixed-point test")
            if r:
                out.append(g)
        return out

    def stabilizers(self, points):
        return [self.stabilizer(x) for x in points]
