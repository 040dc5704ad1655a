# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled running-maximum kernel for the dynamical pseudometrics."""
from libc.math cimport fabs, floor, sqrt

cdef inline double _dist(const double* a, const double* b, int code, Py_ssize_t dim) noexcept nogil:
    cdef double d, e, acc
    cdef Py_ssize_t k
    if code == 0:
        d = fabs(a[0] - b[0])
        d = d - floor(d)
        return d if d <= 1.0 - d else 1.0 - d
    if code == 1:
        return fabs(a[0] - b[0])
    if code == 2:
        d = fabs(a[0] - b[0])
        d = d - floor(d)
        if d > 1.0 - d:
            d = 1.0 - d
        e = fabs(a[1] - b[1])
        e = e - floor(e)
        if e > 1.0 - e:
            e = 1.0 - e
        return sqrt(d * d + e * e)
    acc = 0.0
    for k in range(dim):
        d = a[k] - b[k]
        acc = acc + d * d
    return sqrt(acc)


cdef void _row(const double* bank, Py_ssize_t ns, Py_ssize_t dim, Py_ssize_t i,
               Py_ssize_t j, int code, int stage, Py_ssize_t m,
               const Py_ssize_t* starts, Py_ssize_t K,
               const Py_ssize_t* checkpoints, Py_ssize_t nT, double cap,
               double* out) noexcept nogil:
    cdef const double* pi = bank + i * ns * dim
    cdef const double* pj = bank + j * ns * dim
    cdef double R = -1.0
    cdef double v, best
    cdef Py_ssize_t bi = 0, bj = 0, ka, kb, ca, cb, s, w, lag, c = 0
    cdef bint done
    for w in range(K):
        s = starts[w]
        if stage == 0:
            v = _dist(pi + s * dim, pj + s * dim, code, dim)
            if v > R:
                R = v
        elif stage == 1:
            v = _dist(pi + (s + bi) * dim, pj + (s + bi) * dim, code, dim)
            if v > R:
                best = v
                ca = bi
                for ka in range(m):
                    v = _dist(pi + (s + ka) * dim, pj + (s + ka) * dim, code, dim)
                    if v < best:
                        best = v
                        ca = ka
                        if best <= R:
                            break
                if best > R:
                    R = best
                    bi = ca
        else:
            v = _dist(pi + (s + bi) * dim, pj + (s + bj) * dim, code, dim)
            if v > R:
                best = v
                ca = bi
                cb = bj
                done = False
                # the previous minimiser's lag is the likeliest place for a small value
                lag = bj - bi
                for ka in range(m):
                    kb = ka + lag
                    if kb < 0 or kb >= m:
                        continue
                    v = _dist(pi + (s + ka) * dim, pj + (s + kb) * dim, code, dim)
                    if v < best:
                        best = v
                        ca = ka
                        cb = kb
                        if best <= R:
                            done = True
                            break
                for ka in range(m):
                    if done:
                        break
                    for kb in range(m):
                        v = _dist(pi + (s + ka) * dim, pj + (s + kb) * dim, code, dim)
                        if v < best:
                            best = v
                            ca = ka
                            cb = kb
                            if best <= R:
                                done = True
                                break
                if best > R:
                    R = best
                    bi = ca
                    bj = cb
        while c < nT and checkpoints[c] == w + 1:
            out[c] = R
            c += 1
        if R >= cap:
            break
    while c < nT:
        out[c] = R
        c += 1


def stage_profiles(const double[:, :, ::1] bank, Py_ssize_t i, const Py_ssize_t[::1] js,
                   int code, int stage, Py_ssize_t m, const Py_ssize_t[::1] starts,
                   const Py_ssize_t[::1] checkpoints, double cap, double[:, ::1] out):
    """Running maxima of the stage metric between orbit ``i`` and each orbit in ``js``.

    ``out[r, c]`` receives the maximum over the first ``checkpoints[c]`` windows;
    once the maximum reaches ``cap`` later checkpoints repeat that value.
    """
    cdef Py_ssize_t ns = bank.shape[1], dim = bank.shape[2]
    cdef Py_ssize_t K = starts.shape[0], nT = checkpoints.shape[0], nj = js.shape[0], r
    if nj == 0 or nT == 0:
        return
    if K > 0 and starts[K - 1] + (m if stage else 1) > ns:
        raise ValueError("orbit bank too short for the requested windows")
    cdef const double* b = &bank[0, 0, 0]
    cdef const Py_ssize_t* st = &starts[0]
    cdef const Py_ssize_t* cp = &checkpoints[0]
    with nogil:
        for r in range(nj):
            _row(b, ns, dim, i, js[r], code, stage, m, st, K, cp, nT, cap, &out[r, 0])
