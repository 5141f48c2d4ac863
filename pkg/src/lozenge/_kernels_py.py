"""Pure-numpy transition enumeration, used when the compiled module is absent."""
from __future__ import annotations

import numpy as np


def successors(states: np.ndarray, allowed: np.ndarray, offset: int):
    """Same contract as the compiled ``successors``; vectorized over states per move pattern."""
    m, n = states.shape
    if n == 0:
        return np.zeros(m, dtype=np.int64), np.zeros((m, 0), dtype=np.int64), np.zeros(m, dtype=np.int64)
    width = allowed.shape[0]
    srcs, nxts, upss = [], [], []
    rows = np.arange(m, dtype=np.int64)
    for combo in range(1 << n):
        bits = np.array([(combo >> i) & 1 for i in range(n)], dtype=np.int64)
        nxt = states + (2 * bits - 1)
        idx = nxt - offset
        ok = (idx >= 0).all(axis=1) & ((idx >> 1) < width).all(axis=1)
        if not ok.any():
            continue
        safe = np.clip(idx >> 1, 0, width - 1)
        ok &= allowed[safe].astype(bool).all(axis=1)
        if n > 1:
            ok &= (nxt[:, :-1] > nxt[:, 1:]).all(axis=1)
        if ok.any():
            srcs.append(rows[ok])
            nxts.append(nxt[ok])
            upss.append(np.full(int(ok.sum()), int(bits.sum()), dtype=np.int64))
    if not srcs:
        return np.zeros(0, dtype=np.int64), np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate(srcs)
    nxt = np.concatenate(nxts)
    ups = np.concatenate(upss)
    # match the compiled ordering: by source state, then move pattern
    order = np.argsort(src, kind="stable")
    return src[order], nxt[order], ups[order]
