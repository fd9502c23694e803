"""Configuration-enumeration kernel with a compiled and a numpy backend.

``histogram`` walks every spin configuration ``c`` in ``[0, 2**n_spins)``
(bit ``i`` set means spin ``+1`` at position ``i``) and counts how many
configurations share the same

* group: the low ``group_bits`` bits of ``c``,
* number of disagreeing edges ``(a, b)``,
* boundary key: ``sum(bit(leaf_pos[l]) * leaf_stride[l])``.

The result is an int64 array of shape ``(2**group_bits, n_edges + 1, n_keys)``.
Every configuration is visited, so the counts are an exact census from which
any Ising weight over the configurations can be summed.

The compiled backend is used when the extension was built; set
``PADIC_ISING_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py.histogram

if not os.environ.get("PADIC_ISING_PURE"):
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        _impl = _kernels.histogram


def histogram(n_spins, edges, leaf_pos, leaf_stride, n_keys, group_bits=0, backend=None):
    impl = _impl
    if backend == "python":
        impl = _kernels_py.histogram
    elif backend == "cython":
        from . import _kernels  # type: ignore[attr-defined]

        impl = _kernels.histogram
    elif backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    edges = np.ascontiguousarray(np.asarray(edges, dtype=np.int64).reshape(-1, 2))
    leaf_pos = np.ascontiguousarray(leaf_pos, dtype=np.int64)
    leaf_stride = np.ascontiguousarray(leaf_stride, dtype=np.int64)
    return impl(n_spins, edges, leaf_pos, leaf_stride, int(n_keys), int(group_bits))
