"""Compiled inner loops. All of them release the GIL so chunk workers run in parallel.

``table`` is a DFA's flattened ``state * 256 + byte`` lookup whose non-negative
entries are destination ids already multiplied by 256, which keeps a multiply
off the state-to-state dependency chain.  ``-1`` is a dead transition and
``-2`` marks a byte outside the alphabet.  A walk returns
``(state, hits, stop, code)``: ``code`` is 0 when the walk consumed
``data[lo:hi]`` completely and otherwise the negative entry met at ``data[stop]``.
"""

import numba as nb
import numpy as np


@nb.njit(nogil=True, cache=True)
def walk(data, lo, hi, table, finals, start):
    row = np.int64(start) * 256
    hits = np.int64(0)
    for k in range(lo, hi):
        nxt = table[row + data[k]]
        if nxt < 0:
            return row >> 8, hits, np.int64(k), np.int64(nxt)
        row = np.int64(nxt)
        hits += finals[row >> 8]
    return row >> 8, hits, np.int64(hi), np.int64(0)


@nb.njit(nogil=True, cache=True)
def walk_traced(data, lo, hi, table, finals, start, visited):
    row = np.int64(start) * 256
    hits = np.int64(0)
    for k in range(lo, hi):
        nxt = table[row + data[k]]
        if nxt < 0:
            return row >> 8, hits, np.int64(k), np.int64(nxt)
        row = np.int64(nxt)
        visited[k - lo] = row >> 8
        hits += finals[row >> 8]
    return row >> 8, hits, np.int64(hi), np.int64(0)


@nb.njit(nogil=True, cache=True)
def first_foreign(data, lo, hi, symbol_mask):
    for k in range(lo, hi):
        if symbol_mask[data[k]] == 0:
            return k
    return -1
