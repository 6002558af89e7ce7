"""Subset dynamic program counting Hamiltonian paths, compiled with numba.

Only the vertices strictly between a forced start and a forced end enter the
visited-set mask, so G(Pi_5) needs 2^23 masks rather than 2^25.
"""

import numba
import numpy as np

_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)


@numba.njit(cache=True)
def _count(mult, init, final):
    k = mult.shape[0]
    size = 1 << k
    succ = np.zeros(k, np.int64)
    for v in range(k):
        for u in range(k):
            if mult[v, u] != 0:
                succ[v] |= 1 << u
    dp = np.zeros((size, k), np.uint64)
    for v in range(k):
        dp[1 << v, v] = init[v]
    overflow = False
    for mask in range(1, size):
        for v in range(k):
            c = dp[mask, v]
            if c == 0:
                continue
            todo = succ[v] & ~mask
            while todo:
                low = todo & -todo
                u = 0
                while (low >> u) != 1:
                    u += 1
                todo ^= low
                m = mult[v, u]
                if c > _U64_MAX // m:
                    overflow = True
                add = c * m
                old = dp[mask | low, u]
                new = old + add
                if new < old:
                    overflow = True
                dp[mask | low, u] = new
    total = np.uint64(0)
    for v in range(k):
        if final[v] == 0:
            continue
        c = dp[size - 1, v]
        if c > _U64_MAX // final[v]:
            overflow = True
        add = c * final[v]
        new = total + add
        if new < total:
            overflow = True
        total = new
    return total, overflow


def count_paths(mult: np.ndarray, init: np.ndarray, final: np.ndarray) -> int:
    total, overflow = _count(
        np.ascontiguousarray(mult, dtype=np.uint64),
        np.ascontiguousarray(init, dtype=np.uint64),
        np.ascontiguousarray(final, dtype=np.uint64),
    )
    if overflow:
        raise OverflowError("Hamiltonian path count exceeds 2**64")
    return int(total)
