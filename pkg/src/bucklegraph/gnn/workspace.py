"""Reusable scratch buffers for edge-level arrays.

Fresh multi-megabyte allocations dominate the runtime on memory-constrained
hosts (every page fault costs more than the arithmetic), so the training loop
owns a workspace and the forward/backward passes write into its buffers.
Buffers grow monotonically with a little headroom and are returned as
leading-dimension slices, which stay C-contiguous.
"""

import numpy as np


class Workspace:
    def __init__(self):
        self._bufs = {}

    def take(self, name, shape, dtype=np.float64):
        """A zero-initialization-free scratch array of the given shape."""
        shape = tuple(shape)
        buf = self._bufs.get(name)
        if (buf is None or buf.dtype != np.dtype(dtype)
                or buf.shape[1:] != shape[1:] or buf.shape[0] < shape[0]):
            rows = int(shape[0] * 1.05) + 1
            buf = np.zeros((rows,) + shape[1:], dtype=dtype)
            self._bufs[name] = buf
        return buf[:shape[0]]
