# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics identical to ``_kernels_py``."""

from libc.stdlib cimport malloc, realloc, free


def hilbert_basis(matrix, Py_ssize_t ncols):
    cdef Py_ssize_t rows = len(matrix)
    cdef Py_ssize_t i, j, k, nb = 0, cap_b = 16
    cdef long *cols = <long *> malloc(max(1, rows * ncols) * sizeof(long))
    cdef long *basis = <long *> malloc(cap_b * max(1, ncols) * sizeof(long))
    cdef long dot
    cdef bint dominated, nonzero
    cdef long *bp
    if cols == NULL or basis == NULL:
        free(cols)
        free(basis)
        raise MemoryError()
    try:
        for i in range(rows):
            row = matrix[i]
            for j in range(ncols):
                cols[j * rows + i] = row[j]
        frontier = {}
        for j in range(ncols):
            e = [0] * ncols
            e[j] = 1
            frontier[tuple(e)] = [cols[j * rows + i] for i in range(rows)]
        found = []
        while frontier:
            pending = []
            for v, img in frontier.items():
                nonzero = False
                for i in range(rows):
                    if <long> img[i] != 0:
                        nonzero = True
                        break
                if nonzero:
                    pending.append((v, img))
                else:
                    if nb == cap_b:
                        cap_b *= 2
                        bp = <long *> realloc(basis, cap_b * ncols * sizeof(long))
                        if bp == NULL:
                            raise MemoryError()
                        basis = bp
                    for j in range(ncols):
                        basis[nb * ncols + j] = v[j]
                    nb += 1
                    found.append(v)
            nxt = {}
            for v, img in pending:
                for j in range(ncols):
                    dot = 0
                    for i in range(rows):
                        dot += (<long> img[i]) * cols[j * rows + i]
                    if dot >= 0:
                        continue
                    w = list(v)
                    w[j] += 1
                    w = tuple(w)
                    if w in nxt:
                        continue
                    dominated = False
                    for k in range(nb):
                        dominated = True
                        for i in range(ncols):
                            if basis[k * ncols + i] > <long> w[i]:
                                dominated = False
                                break
                        if dominated:
                            break
                    if dominated:
                        continue
                    nxt[w] = [(<long> img[i]) + cols[j * rows + i] for i in range(rows)]
            frontier = nxt
        return sorted(found)
    finally:
        free(cols)
        free(basis)


def horn_search(sources, nets, budget, target):
    cdef Py_ssize_t n = len(sources)
    cdef Py_ssize_t dims = len(budget)
    cdef Py_ssize_t i, d
    cdef long *src = <long *> malloc(max(1, n * dims) * sizeof(long))
    cdef long *net = <long *> malloc(max(1, n * dims) * sizeof(long))
    if src == NULL or net == NULL:
        free(src)
        free(net)
        raise MemoryError()
    try:
        for i in range(n):
            for d in range(dims):
                src[i * dims + d] = sources[i][d]
                net[i * dims + d] = nets[i][d]
        counts = [0] * n
        dead = set()
        ok = _horn_rec(0, n, dims, src, net, list(budget), list(target), counts, dead)
        return counts if ok else None
    finally:
        free(src)
        free(net)


cdef bint _horn_rec(Py_ssize_t i, Py_ssize_t n, Py_ssize_t dims, long *src, long *net,
                    list bud, list res, list counts, set dead) except -1:
    cdef Py_ssize_t d, t
    cdef long cap = -1, q, k
    cdef bint zero = True
    for d in range(dims):
        if <long> res[d] != 0:
            zero = False
            break
    if zero:
        for t in range(i, n):
            counts[t] = 0
        return True
    if i == n:
        return False
    key = (i, tuple(bud), tuple(res))
    if key in dead:
        return False
    for d in range(dims):
        if src[i * dims + d] > 0:
            q = (<long> bud[d]) // src[i * dims + d]
            if cap < 0 or q < cap:
                cap = q
    if cap < 0:
        cap = 0
    k = cap
    while k >= 0:
        counts[i] = k
        nb = [(<long> bud[d]) - k * src[i * dims + d] for d in range(dims)]
        nr = [(<long> res[d]) - k * net[i * dims + d] for d in range(dims)]
        if _horn_rec(i + 1, n, dims, src, net, nb, nr, counts, dead):
            return True
        k -= 1
    counts[i] = 0
    dead.add(key)
    return False
