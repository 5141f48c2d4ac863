# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transition enumeration for the layered particle DP."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def successors(cnp.int64_t[:, ::1] states, cnp.uint8_t[::1] allowed, cnp.int64_t offset):
    """Enumerate non-colliding one-step moves from every state.

    ``states`` rows hold strictly decreasing twice-positions.  A target twice
    position ``p`` is allowed when ``0 <= (p - offset) // 2 < len(allowed)`` and the
    mask entry is set.  Returns ``(src, nxt, ups)``.
    """
    cdef Py_ssize_t m = states.shape[0]
    cdef Py_ssize_t n = states.shape[1]
    cdef Py_ssize_t width = allowed.shape[0]
    cdef Py_ssize_t cap = 64
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t s, i, k, nmoves
    cdef cnp.int64_t p, idx
    cdef long long combo
    cdef bint ok
    if n == 0:
        return (np.zeros(m, dtype=np.int64), np.zeros((m, 0), dtype=np.int64),
                np.zeros(m, dtype=np.int64))
    nmoves = 1 << n
    src_arr = np.empty(cap, dtype=np.int64)
    nxt_arr = np.empty((cap, n), dtype=np.int64)
    ups_arr = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] src = src_arr
    cdef cnp.int64_t[:, ::1] nxt = nxt_arr
    cdef cnp.int64_t[::1] ups = ups_arr
    cdef cnp.int64_t[::1] buf = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t nup
    for s in range(m):
        for combo in range(nmoves):
            ok = True
            nup = 0
            for i in range(n):
                if (combo >> i) & 1:
                    p = states[s, i] + 1
                    nup += 1
                else:
                    p = states[s, i] - 1
                idx = p - offset
                if idx < 0 or (idx >> 1) >= width or not allowed[idx >> 1]:
                    ok = False
                    break
                if i > 0 and p >= buf[i - 1]:
                    ok = False
                    break
                buf[i] = p
            if not ok:
                continue
            if count == cap:
                cap *= 2
                src_arr = np.resize(src_arr, cap)
                ups_arr = np.resize(ups_arr, cap)
                nxt_arr = np.resize(nxt_arr, (cap, n))
                src = src_arr
                ups = ups_arr
                nxt = nxt_arr
            src[count] = s
            ups[count] = nup
            for k in range(n):
                nxt[count, k] = buf[k]
            count += 1
    return src_arr[:count].copy(), nxt_arr[:count].copy(), ups_arr[:count].copy()
