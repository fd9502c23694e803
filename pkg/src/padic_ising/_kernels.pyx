# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernel; see kernels.py for the contract.

Configurations are visited in Gray-code order, so consecutive ones differ in
a single spin and the disagreement count and boundary key are updated from
that spin's incident edges alone.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


def histogram(int n_spins,
              cnp.int64_t[:, ::1] edges,
              cnp.int64_t[::1] leaf_pos,
              cnp.int64_t[::1] leaf_stride,
              int n_keys,
              int group_bits):
    cdef Py_ssize_t n_edges = edges.shape[0]
    cdef Py_ssize_t n_leaves = leaf_pos.shape[0]
    cdef long long n_groups = 1LL << group_bits
    cdef long long gmask = n_groups - 1
    cdef unsigned long long total = 1ULL << n_spins
    out = np.zeros((n_groups, n_edges + 1, n_keys), dtype=np.int64)
    cdef cnp.int64_t[:, :, ::1] counts = out

    # adjacency in CSR form
    deg_np = np.zeros(n_spins + 1, dtype=np.int64)
    for e in range(n_edges):
        deg_np[edges[e, 0] + 1] += 1
        deg_np[edges[e, 1] + 1] += 1
    start_np = np.cumsum(deg_np)
    nbr_np = np.empty(2 * n_edges, dtype=np.int64)
    fill = start_np[:n_spins].copy()
    for e in range(n_edges):
        u, w = edges[e, 0], edges[e, 1]
        nbr_np[fill[u]] = w
        fill[u] += 1
        nbr_np[fill[w]] = u
        fill[w] += 1
    stride_np = np.zeros(n_spins, dtype=np.int64)
    for l in range(n_leaves):
        stride_np[leaf_pos[l]] += leaf_stride[l]
    cdef cnp.int64_t[::1] start = start_np
    cdef cnp.int64_t[::1] nbr = nbr_np
    cdef cnp.int64_t[::1] stride = stride_np

    cdef unsigned long long i, g = 0
    cdef long long dis = 0, key = 0
    cdef int b
    cdef Py_ssize_t j
    cdef long long bit_b
    with nogil:
        counts[0, 0, 0] += 1
        for i in range(1, total):
            b = __builtin_ctzll(i)
            g ^= 1ULL << b
            bit_b = (g >> b) & 1
            for j in range(start[b], start[b + 1]):
                # equal after the flip means the edge just stopped disagreeing
                if ((g >> nbr[j]) & 1) == bit_b:
                    dis -= 1
                else:
                    dis += 1
            if bit_b:
                key += stride[b]
            else:
                key -= stride[b]
            counts[g & gmask, dis, key] += 1
    return out
