"""Bitmask dynamic-programming kernels used by the exact oracle.

These are the hot inner loops of the differential-testing campaigns (they
run once per instance per prefix, across tens of thousands of instances),
so by default they are compiled with numba.  Setting ``INTERVALPC_PURE=1``
in the environment selects the pure numpy/python implementations instead;
``intervalpc bench --kernels`` times one against the other.

State encoding: vertices 0..n-1, subsets as int64 bitmasks, ``adj[v]`` the
neighbour bitmask of v.

* ``cover_tables``  -- f[mask, last] = minimum number of paths covering
  ``mask`` where the currently open path ends at ``last``; g[mask] is the
  row minimum, i.e. the minimum path cover size of the induced subgraph.
* ``reach_table``   -- R[mask] = bitmask of vertices v such that the
  induced subgraph on ``mask`` has a Hamiltonian path ending at v.
* ``terminal_sizes``-- minimum path cover size for every choice of one
  fixed path endpoint, from one pass over (g, R).
"""

from __future__ import annotations

import os

import numpy as np

_INF = 127  # int8 sentinel; path counts never exceed the vertex bound

PURE_REQUESTED = os.environ.get("INTERVALPC_PURE", "") not in ("", "0")

USING_NUMBA = False
if not PURE_REQUESTED:
    try:
        from numba import njit
        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False


def _cover_tables_py(adj: np.ndarray, n: int):
    size = 1 << n
    f = np.full((size, n), _INF, dtype=np.int8)
    g = np.full(size, _INF, dtype=np.int8)
    g[0] = 0
    for v in range(n):
        f[1 << v, v] = 1
    adj_list = [int(a) for a in adj]
    fl = f  # local alias
    for mask in range(1, size):
        row = fl[mask]
        best = _INF
        m = mask
        while m:
            b = m & (-m)
            m ^= b
            last = b.bit_length() - 1
            prev = mask ^ b
            if prev:
                val = g[prev] + 1
                cand = adj_list[last] & prev
                if cand:
                    mm = cand
                    while mm:
                        ub = mm & (-mm)
                        mm ^= ub
                        fv = fl[prev, ub.bit_length() - 1]
                        if fv < val:
                            val = fv
                if val < row[last]:
                    row[last] = val
            if row[last] < best:
                best = row[last]
        g[mask] = best
    return f, g


def _reach_table_py(adj: np.ndarray, n: int):
    size = 1 << n
    R = np.zeros(size, dtype=np.int64)
    adj_list = [int(a) for a in adj]
    Rl = [0] * size
    for v in range(n):
        Rl[1 << v] = 1 << v
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue
        r = 0
        m = mask
        while m:
            b = m & (-m)
            m ^= b
            v = b.bit_length() - 1
            if Rl[mask ^ b] & adj_list[v]:
                r |= b
        Rl[mask] = r
    R[:] = Rl
    return R


def _terminal_sizes_py(g: np.ndarray, R: np.ndarray, n: int):
    full = (1 << n) - 1
    out = np.full(n + 1, _INF, dtype=np.int64)
    out[0] = g[full]
    Rl = R
    for mask in range(1, full + 1):
        ends = int(Rl[mask])
        if not ends:
            continue
        cand = 1 + int(g[full ^ mask])
        m = ends
        while m:
            b = m & (-m)
            m ^= b
            t = b.bit_length() - 1
            if cand < out[t + 1]:
                out[t + 1] = cand
    return out


if USING_NUMBA:

    @njit(cache=True)
    def _cover_tables_nb(adj, n):  # pragma: no cover - exercised via wrapper
        size = 1 << n
        f = np.full((size, n), _INF, dtype=np.int8)
        g = np.full(size, _INF, dtype=np.int8)
        g[0] = 0
        for v in range(n):
            f[1 << v, v] = 1
        for mask in range(1, size):
            best = _INF
            for last in range(n):
                if not (mask >> last) & 1:
                    continue
                prev = mask ^ (1 << last)
                if prev:
                    val = g[prev] + 1
                    cand = adj[last] & prev
                    for u in range(n):
                        if (cand >> u) & 1 and f[prev, u] < val:
                            val = f[prev, u]
                    if val < f[mask, last]:
                        f[mask, last] = val
                if f[mask, last] < best:
                    best = f[mask, last]
            g[mask] = best
        return f, g

    @njit(cache=True)
    def _reach_table_nb(adj, n):  # pragma: no cover
        size = 1 << n
        R = np.zeros(size, dtype=np.int64)
        for v in range(n):
            R[1 << v] = 1 << v
        for mask in range(1, size):
            if mask & (mask - 1) == 0:
                continue
            r = np.int64(0)
            for v in range(n):
                if (mask >> v) & 1 and R[mask ^ (1 << v)] & adj[v]:
                    r |= np.int64(1) << v
            R[mask] = r
        return R

    @njit(cache=True)
    def _terminal_sizes_nb(g, R, n):  # pragma: no cover
        full = (1 << n) - 1
        out = np.full(n + 1, _INF, dtype=np.int64)
        out[0] = g[full]
        for mask in range(1, full + 1):
            ends = R[mask]
            if ends == 0:
                continue
            cand = 1 + g[full ^ mask]
            for t in range(n):
                if (ends >> t) & 1 and cand < out[t + 1]:
                    out[t + 1] = cand
        return out


def cover_tables(adj: np.ndarray, n: int, pure: bool | None = None):
    """Minimum path cover DP tables (f, g) for the graph given as bitmasks."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8), np.zeros(1, dtype=np.int8)
    use_pure = PURE_REQUESTED if pure is None else pure
    if USING_NUMBA and not use_pure:
        return _cover_tables_nb(adj, n)
    return _cover_tables_py(adj, n)


def reach_table(adj: np.ndarray, n: int, pure: bool | None = None):
    """Hamiltonian-path endpoint reachability table R."""
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    use_pure = PURE_REQUESTED if pure is None else pure
    if USING_NUMBA and not use_pure:
        return _reach_table_nb(adj, n)
    return _reach_table_py(adj, n)


def terminal_sizes(g: np.ndarray, R: np.ndarray, n: int, pure: bool | None = None):
    """Array [lam_free, lam_T(v_1), ..., lam_T(v_n)] from the DP tables."""
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    use_pure = PURE_REQUESTED if pure is None else pure
    if USING_NUMBA and not use_pure:
        return _terminal_sizes_nb(g, R, n)
    return _terminal_sizes_py(g, R, n)


def backend_name(pure: bool | None = None) -> str:
    use_pure = PURE_REQUESTED if pure is None else pure
    return "numba" if (USING_NUMBA and not use_pure) else "pure"
