"""Hot loops of the segmentation engine.

Two interchangeable backends compute the same quantities with the same
floating-point operation order, so results agree bit for bit:

* ``numba``: ``@njit`` compiled loops (default when numba imports).
* ``numpy``: vectorized fallback.

Set ``RESIL_DISABLE_NUMBA=1`` to force the numpy path.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("RESIL_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def _prefix_sums(xc, yc):
    z = np.zeros(1)
    return (
        np.concatenate((z, np.cumsum(xc))),
        np.concatenate((z, np.cumsum(yc))),
        np.concatenate((z, np.cumsum(xc * xc))),
        np.concatenate((z, np.cumsum(xc * yc))),
        np.concatenate((z, np.cumsum(yc * yc))),
    )


def cost_matrix_numpy(x, y):
    """C[i, j] = least-squares line SSE over samples i..j inclusive, j > i.

    Expects centered inputs. Entries with j <= i are +inf.
    """
    n = x.size
    sx, sy, sxx, sxy, syy = _prefix_sums(x, y)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    valid = j > i
    ii = np.where(valid, i, 0)
    jj = np.where(valid, j + 1, 1)
    m = (jj - ii).astype(float)
    ax = sx[jj] - sx[ii]
    ay = sy[jj] - sy[ii]
    vxx = (sxx[jj] - sxx[ii]) - ax * ax / m
    vxy = (sxy[jj] - sxy[ii]) - ax * ay / m
    vyy = (syy[jj] - syy[ii]) - ay * ay / m
    with np.errstate(divide="ignore", invalid="ignore"):
        sse = vyy - vxy * vxy / vxx
    sse = np.where(sse > 0.0, sse, 0.0)
    return np.where(valid, sse, np.inf)


def dp_numpy(cost, k_max):
    """Optimal k-segment partitions of 0..n-1 for every k <= k_max.

    Segments share boundary samples. ``table[k, j]`` is the least total cost
    of covering samples 0..j with k segments; ``back[k, j]`` the start index
    of the last segment. Ties resolve to the smallest start index.
    """
    n = cost.shape[0]
    table = np.full((k_max + 1, n), np.inf)
    back = np.zeros((k_max + 1, n), dtype=np.int64)
    table[1] = cost[0]
    for k in range(2, k_max + 1):
        cand = table[k - 1][:, None] + cost
        back[k] = np.argmin(cand, axis=0)
        table[k] = cand[back[k], np.arange(n)]
    return table, back


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def cost_matrix_numba(x, y):
        n = x.size
        sx, sy, sxx, sxy, syy = _prefix_sums_nb(x, y)
        out = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                m = float(j + 1 - i)
                ax = sx[j + 1] - sx[i]
                ay = sy[j + 1] - sy[i]
                vxx = (sxx[j + 1] - sxx[i]) - ax * ax / m
                vxy = (sxy[j + 1] - sxy[i]) - ax * ay / m
                vyy = (syy[j + 1] - syy[i]) - ay * ay / m
                sse = vyy - vxy * vxy / vxx
                out[i, j] = sse if sse > 0.0 else 0.0
        return out

    @numba.njit(cache=True)
    def _prefix_sums_nb(xc, yc):
        n = xc.size
        sx = np.zeros(n + 1)
        sy = np.zeros(n + 1)
        sxx = np.zeros(n + 1)
        sxy = np.zeros(n + 1)
        syy = np.zeros(n + 1)
        for i in range(n):
            sx[i + 1] = sx[i] + xc[i]
            sy[i + 1] = sy[i] + yc[i]
            sxx[i + 1] = sxx[i] + xc[i] * xc[i]
            sxy[i + 1] = sxy[i] + xc[i] * yc[i]
            syy[i + 1] = syy[i] + yc[i] * yc[i]
        return sx, sy, sxx, sxy, syy

    @numba.njit(cache=True)
    def dp_numba(cost, k_max):
        n = cost.shape[0]
        table = np.full((k_max + 1, n), np.inf)
        back = np.zeros((k_max + 1, n), dtype=np.int64)
        for j in range(n):
            table[1, j] = cost[0, j]
        for k in range(2, k_max + 1):
            for j in range(n):
                best = np.inf
                arg = 0
                for i in range(j):
                    v = table[k - 1, i] + cost[i, j]
                    if v < best:
                        best = v
                        arg = i
                table[k, j] = best
                back[k, j] = arg
        return table, back

else:  # pragma: no cover
    cost_matrix_numba = None
    dp_numba = None


def cost_matrix(x, y, backend=None):
    backend = backend or BACKEND
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # centering keeps cancellation error proportional to the local spread
    x = np.ascontiguousarray(x - x.mean())
    y = np.ascontiguousarray(y - y.mean())
    if backend == "numba":
        return cost_matrix_numba(x, y)
    return cost_matrix_numpy(x, y)


def dp(cost, k_max, backend=None):
    backend = backend or BACKEND
    if backend == "numba":
        return dp_numba(np.ascontiguousarray(cost), int(k_max))
    return dp_numpy(cost, int(k_max))
