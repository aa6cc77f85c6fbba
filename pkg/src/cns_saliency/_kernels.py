"""Compiled kernels for grayscale geodesic reconstruction.

Hybrid algorithm: one raster scan, one anti-raster scan that seeds a FIFO
queue, then queue propagation until the fixpoint is reached.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# (dr, dc) neighbours preceding a pixel in raster order
_PREV8 = np.array([[-1, -1], [-1, 0], [-1, 1], [0, -1]], dtype=np.int64)
_PREV4 = np.array([[-1, 0], [0, -1]], dtype=np.int64)
_ALL8 = np.array(
    [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]], dtype=np.int64
)
_ALL4 = np.array([[-1, 0], [0, -1], [0, 1], [1, 0]], dtype=np.int64)


@njit(cache=True)
def _push(queue, tail, count, value):
    cap = queue.shape[0]
    if count == cap:
        grown = np.empty(cap * 2, dtype=queue.dtype)
        # unroll the ring so that head restarts at 0
        head = (tail - count) % cap
        for k in range(count):
            grown[k] = queue[(head + k) % cap]
        queue = grown
        tail = count
        cap = cap * 2
    queue[tail] = value
    tail = (tail + 1) % cap
    return queue, tail, count + 1


@njit(cache=True)
def reconstruct_dilation(marker, mask, prev, allnb):
    h, w = mask.shape
    out = np.minimum(marker, mask)
    nprev = prev.shape[0]

    for r in range(h):
        for c in range(w):
            v = out[r, c]
            for k in range(nprev):
                rr = r + prev[k, 0]
                cc = c + prev[k, 1]
                if 0 <= rr < h and 0 <= cc < w and out[rr, cc] > v:
                    v = out[rr, cc]
            m = mask[r, c]
            out[r, c] = v if v < m else m

    queue = np.empty(max(16, h * w // 4), dtype=np.int64)
    head = 0
    tail = 0
    count = 0
    for r in range(h - 1, -1, -1):
        for c in range(w - 1, -1, -1):
            v = out[r, c]
            for k in range(nprev):
                rr = r - prev[k, 0]
                cc = c - prev[k, 1]
                if 0 <= rr < h and 0 <= cc < w and out[rr, cc] > v:
                    v = out[rr, cc]
            m = mask[r, c]
            v = v if v < m else m
            out[r, c] = v
            for k in range(nprev):
                rr = r - prev[k, 0]
                cc = c - prev[k, 1]
                if 0 <= rr < h and 0 <= cc < w:
                    if out[rr, cc] < v and out[rr, cc] < mask[rr, cc]:
                        queue, tail, count = _push(queue, tail, count, r * w + c)
                        break

    nall = allnb.shape[0]
    while count > 0:
        cap = queue.shape[0]
        head = (tail - count) % cap
        p = queue[head]
        count -= 1
        r = p // w
        c = p % w
        v = out[r, c]
        for k in range(nall):
            rr = r + allnb[k, 0]
            cc = c + allnb[k, 1]
            if 0 <= rr < h and 0 <= cc < w:
                q = out[rr, cc]
                m = mask[rr, cc]
                if q < v and q != m:
                    out[rr, cc] = v if v < m else m
                    queue, tail, count = _push(queue, tail, count, rr * w + cc)
    return out


def neighbourhood(connectivity: int):
    if connectivity == 8:
        return _PREV8, _ALL8
    if connectivity == 4:
        return _PREV4, _ALL4
    raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
