# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled token kernels; must match _pykernels exactly."""

from libc.stdlib cimport free, malloc


def lcs_length(int[::1] a, int[::1] b):
    """Length of the longest common subsequence of ``a`` and ``b``."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0
    cdef int *prev = <int *> malloc((m + 1) * sizeof(int))
    cdef int *cur = <int *> malloc((m + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        if prev != NULL:
            free(prev)
        if cur != NULL:
            free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int ai, left, up
    cdef int *tmp
    try:
        for j in range(m + 1):
            prev[j] = 0
            cur[j] = 0
        for i in range(n):
            ai = a[i]
            for j in range(m):
                if ai == b[j]:
                    cur[j + 1] = prev[j] + 1
                else:
                    left = cur[j]
                    up = prev[j + 1]
                    cur[j + 1] = left if left >= up else up
            tmp = prev
            prev = cur
            cur = tmp
        return prev[m]
    finally:
        free(prev)
        free(cur)


def clipped_overlap(int[::1] cand, int[::1] ref):
    """Unigram matches with counts clipped to the reference frequency."""
    cdef dict ref_counts = {}
    cdef dict cand_counts = {}
    cdef Py_ssize_t i
    cdef int t
    for i in range(ref.shape[0]):
        t = ref[i]
        ref_counts[t] = ref_counts.get(t, 0) + 1
    for i in range(cand.shape[0]):
        t = cand[i]
        cand_counts[t] = cand_counts.get(t, 0) + 1
    cdef long total = 0
    cdef long c, r
    for t, c in cand_counts.items():
        r = ref_counts.get(t, 0)
        total += c if c < r else r
    return total
