"""Vectorized numpy fallback for the enumeration kernel."""

import numpy as np

_CHUNK = 1 << 16


def histogram(n_spins, edges, leaf_pos, leaf_stride, n_keys, group_bits):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    leaf_pos = np.asarray(leaf_pos, dtype=np.int64)
    leaf_stride = np.asarray(leaf_stride, dtype=np.int64)
    n_edges = len(edges)
    n_groups = 1 << group_bits
    size = n_groups * (n_edges + 1) * n_keys
    flat = np.zeros(size, dtype=np.int64)
    total = 1 << n_spins
    for start in range(0, total, _CHUNK):
        c = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        dis = np.zeros_like(c)
        for a, b in edges:
            dis += ((c >> a) ^ (c >> b)) & 1
        key = np.zeros_like(c)
        for pos, stride in zip(leaf_pos, leaf_stride):
            key += ((c >> pos) & 1) * stride
        idx = ((c & (n_groups - 1)) * (n_edges + 1) + dis) * n_keys + key
        flat += np.bincount(idx, minlength=size)
    return flat.reshape(n_groups, n_edges + 1, n_keys)
