# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Semantics and float accumulation order match _pure
exactly (ascending-bit subset folds, left-to-right resample sums, identical
interpolation expression), so either backend gives bit-identical output."""

import numpy as np

from libc.stdlib cimport free, malloc

BACKEND = "cython"


cdef bint _lex_mask_smaller(unsigned long long m1, unsigned long long m2) noexcept:
    cdef unsigned long long low1, low2
    while m1 != 0 and m2 != 0:
        low1 = m1 & (~m1 + 1)
        low2 = m2 & (~m2 + 1)
        if low1 != low2:
            return low1 < low2
        m1 ^= low1
        m2 ^= low2
    return m2 != 0


def lex_mask_smaller(m1, m2):
    return bool(_lex_mask_smaller(m1, m2))


def exhaustive_best_subset(costs, benefits, double budget):
    cdef double[::1] c = np.ascontiguousarray(costs, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(benefits, dtype=np.float64)
    cdef int n = c.shape[0]
    cdef unsigned long long total = 1ULL << n
    cdef double *csum = <double *> malloc(total * sizeof(double))
    cdef double *bsum = <double *> malloc(total * sizeof(double))
    if csum == NULL or bsum == NULL:
        free(csum)
        free(bsum)
        raise MemoryError()
    cdef unsigned long long m, base, best_mask
    cdef int i
    cdef double net, best_net, best_cost, best_ben
    cdef bint have_best
    try:
        csum[0] = 0.0
        bsum[0] = 0.0
        for i in range(n):
            base = 1ULL << i
            # masks in [2^i, 2^(i+1)) have highest bit i, so this fills
            # every subset sum in ascending bit order
            for m in range(base, base << 1):
                csum[m] = csum[m - base] + c[i]
                bsum[m] = bsum[m - base] + b[i]
        have_best = False
        best_mask = 0
        best_net = 0.0
        best_cost = 0.0
        best_ben = 0.0
        for m in range(total):
            if csum[m] <= budget:
                net = bsum[m] - csum[m]
                if (not have_best or net > best_net
                        or (net == best_net and _lex_mask_smaller(m, best_mask))):
                    have_best = True
                    best_mask = m
                    best_net = net
                    best_cost = csum[m]
                    best_ben = bsum[m]
        if not have_best:
            raise ValueError("budget must be >= 0")
        return int(best_mask), best_cost, best_ben
    finally:
        free(csum)
        free(bsum)


def bootstrap_means(values, idx):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef long[:, ::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t reps = ix.shape[0]
    cdef Py_ssize_t n = ix.shape[1]
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t r, k
    cdef double acc
    for r in range(reps):
        acc = 0.0
        for k in range(n):
            acc += v[ix[r, k]]
        o[r] = acc / n
    return out


cdef double _select_kth(double *buf, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    """Quickselect: returns the k-th order statistic (0-based) and leaves
    every element at a position > k greater than or equal to it.

    Order statistics are value-defined, so this matches sort-then-index
    bit for bit.
    """
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j, mid
    cdef double pivot, tmp
    while hi > lo:
        if hi - lo < 16:
            for i in range(lo + 1, hi + 1):
                tmp = buf[i]
                j = i - 1
                while j >= lo and buf[j] > tmp:
                    buf[j + 1] = buf[j]
                    j -= 1
                buf[j + 1] = tmp
            break
        mid = lo + (hi - lo) // 2
        if buf[mid] < buf[lo]:
            tmp = buf[mid]; buf[mid] = buf[lo]; buf[lo] = tmp
        if buf[hi] < buf[lo]:
            tmp = buf[hi]; buf[hi] = buf[lo]; buf[lo] = tmp
        if buf[hi] < buf[mid]:
            tmp = buf[hi]; buf[hi] = buf[mid]; buf[mid] = tmp
        pivot = buf[mid]
        i = lo
        j = hi
        while i <= j:
            while buf[i] < pivot:
                i += 1
            while buf[j] > pivot:
                j -= 1
            if i <= j:
                tmp = buf[i]; buf[i] = buf[j]; buf[j] = tmp
                i += 1
                j -= 1
        # Hoare postcondition: [..j] <= pivot, [i..] >= pivot, between == pivot
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            break  # buf[k] equals the pivot and is already in place
    return buf[k]


def bootstrap_quantiles(values, idx, long j, double frac):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef long[:, ::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t reps = ix.shape[0]
    cdef Py_ssize_t n = ix.shape[1]
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] o = out
    cdef double *buf = <double *> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t r, k
    cdef double lo, hi
    try:
        for r in range(reps):
            for k in range(n):
                buf[k] = v[ix[r, k]]
            lo = _select_kth(buf, n, j)
            if j + 1 >= n:
                o[r] = lo
            else:
                # next order statistic = min of the tail left >= buf[j]
                hi = buf[j + 1]
                for k in range(j + 2, n):
                    if buf[k] < hi:
                        hi = buf[k]
                o[r] = lo + frac * (hi - lo)
        return out
    finally:
        free(buf)


def mwu_extreme_count(dmid, int n_a, long obs_dev):
    cdef long[::1] d = np.ascontiguousarray(dmid, dtype=np.int64)
    cdef int n = d.shape[0]
    cdef long center = n_a * (n + 1)
    cdef int *pos = <int *> malloc(n_a * sizeof(int))
    if pos == NULL:
        raise MemoryError()
    cdef long count = 0, s
    cdef int i, k
    cdef long dev
    try:
        for i in range(n_a):
            pos[i] = i
        while True:
            s = 0
            for i in range(n_a):
                s += d[pos[i]]
            dev = s - center
            if dev < 0:
                dev = -dev
            if dev >= obs_dev:
                count += 1
            # advance to the next combination in lexicographic order
            k = n_a - 1
            while k >= 0 and pos[k] == n - n_a + k:
                k -= 1
            if k < 0:
                break
            pos[k] += 1
            for i in range(k + 1, n_a):
                pos[i] = pos[i - 1] + 1
        return int(count)
    finally:
        free(pos)
