"""Hot numerical kernels with a numba fast path and a pure-numpy fallback.

The active path is chosen once at import time: numba is used when it imports
successfully and the environment variable ``HYPMASS_NO_NUMBA`` is unset (or
"0"). Both paths implement identical arithmetic on identical traversal orders,
so results agree to rounding and every run under a fixed environment is
bit-reproducible. ``benchmarks/bench_kernels.py`` times one path against the
other.

Kernels here are the loops that dominate the axisymmetric pipeline:

* five-point flux-form stencil assembly and application on the (r, theta) grid,
* marching-squares segment extraction (fallback contouring),
* batched monotone root finding along radial grid lines,
* cumulative Simpson tables used by the line-quadrature volume integrals.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = False
if os.environ.get("HYPMASS_NO_NUMBA", "0") not in ("1", "true", "yes"):
    try:
        from numba import njit

        USE_NUMBA = True
    except Exception:  # pragma: no cover - numba is a hard dep, but stay safe
        USE_NUMBA = False

if not USE_NUMBA:
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


@njit(cache=True)
def assemble_flux_stencil(alpha, beta, hr, ht, robin_rate):
    """COO data for the conservative operator div(alpha d_r .) + div(beta d_th .).

    alpha, beta: (n_r, n_t) face coefficient fields sampled at nodes; faces use
    arithmetic means. Interior rows are the five-point flux balance. Row i = n_r-1
    carries the one-sided Robin closure  d_r h + robin_rate * h = 0. The r_min row
    keeps a zero-flux (Neumann) inner face; theta end rows lose the outer flux,
    which is the natural closure since beta ~ sin(theta) vanishes there.

    Returns (rows, cols, vals) with a fixed traversal order.
    """
    n_r, n_t = alpha.shape
    nnz_max = n_r * n_t * 5
    rows = np.empty(nnz_max, dtype=np.int64)
    cols = np.empty(nnz_max, dtype=np.int64)
    vals = np.empty(nnz_max, dtype=np.float64)
    k = 0
    for i in range(n_r):
        for j in range(n_t):
            row = i * n_t + j
            if i == n_r - 1:
                # Robin: (3h_i - 4h_{i-1} + h_{i-2}) / (2 hr) + rate * h_i = 0
                rows[k] = row; cols[k] = row; vals[k] = 1.5 / hr + robin_rate; k += 1
                rows[k] = row; cols[k] = row - n_t; vals[k] = -2.0 / hr; k += 1
                rows[k] = row; cols[k] = row - 2 * n_t; vals[k] = 0.5 / hr; k += 1
                continue
            diag = 0.0
            a_p = 0.5 * (alpha[i, j] + alpha[i + 1, j])
            rows[k] = row; cols[k] = row + n_t; vals[k] = a_p / (hr * hr); k += 1
            diag -= a_p / (hr * hr)
            if i > 0:
                a_m = 0.5 * (alpha[i, j] + alpha[i - 1, j])
                rows[k] = row; cols[k] = row - n_t; vals[k] = a_m / (hr * hr); k += 1
                diag -= a_m / (hr * hr)
            if j < n_t - 1:
                b_p = 0.5 * (beta[i, j] + beta[i, j + 1])
                rows[k] = row; cols[k] = row + 1; vals[k] = b_p / (ht * ht); k += 1
                diag -= b_p / (ht * ht)
            if j > 0:
                b_m = 0.5 * (beta[i, j] + beta[i, j - 1])
                rows[k] = row; cols[k] = row - 1; vals[k] = b_m / (ht * ht); k += 1
                diag -= b_m / (ht * ht)
            rows[k] = row; cols[k] = row; vals[k] = diag; k += 1
    return rows[:k], cols[:k], vals[:k]


@njit(cache=True)
def apply_flux_stencil(alpha, beta, hr, ht, field):
    """Apply the interior flux-form operator to ``field`` (Robin rows give 0)."""
    n_r, n_t = alpha.shape
    out = np.zeros((n_r, n_t), dtype=np.float64)
    for i in range(n_r - 1):
        for j in range(n_t):
            acc = 0.0
            a_p = 0.5 * (alpha[i, j] + alpha[i + 1, j])
            acc += a_p * (field[i + 1, j] - field[i, j]) / (hr * hr)
            if i > 0:
                a_m = 0.5 * (alpha[i, j] + alpha[i - 1, j])
                acc -= a_m * (field[i, j] - field[i - 1, j]) / (hr * hr)
            if j < n_t - 1:
                b_p = 0.5 * (beta[i, j] + beta[i, j + 1])
                acc += b_p * (field[i, j + 1] - field[i, j]) / (ht * ht)
            if j > 0:
                b_m = 0.5 * (beta[i, j] + beta[i, j - 1])
                acc -= b_m * (field[i, j] - field[i, j - 1]) / (ht * ht)
            out[i, j] = acc
    return out


@njit(cache=True)
def marching_segments(u, level):
    """Marching-squares segments of {u = level} in index coordinates.

    Returns an (n_seg, 4) array of (x0, y0, x1, y1) with x along axis 0 and y
    along axis 1, linear interpolation along cell edges. Fallback contouring
    path for level curves that are not radial graphs.
    """
    n_r, n_t = u.shape
    max_seg = 2 * n_r * n_t
    segs = np.empty((max_seg, 4), dtype=np.float64)
    n = 0
    for i in range(n_r - 1):
        for j in range(n_t - 1):
            v00 = u[i, j] - level
            v10 = u[i + 1, j] - level
            v01 = u[i, j + 1] - level
            v11 = u[i + 1, j + 1] - level
            case = 0
            if v00 > 0.0:
                case += 1
            if v10 > 0.0:
                case += 2
            if v11 > 0.0:
                case += 4
            if v01 > 0.0:
                case += 8
            if case == 0 or case == 15:
                continue
            # edge crossing points: bottom(y=j), right(x=i+1), top(y=j+1), left(x=i)
            xb = i + v00 / (v00 - v10) if (v00 > 0.0) != (v10 > 0.0) else -1.0
            yr = j + v10 / (v10 - v11) if (v10 > 0.0) != (v11 > 0.0) else -1.0
            xt = i + v01 / (v01 - v11) if (v01 > 0.0) != (v11 > 0.0) else -1.0
            yl = j + v00 / (v00 - v01) if (v00 > 0.0) != (v01 > 0.0) else -1.0
            pts_x = np.empty(4, dtype=np.float64)
            pts_y = np.empty(4, dtype=np.float64)
            m = 0
            if xb >= 0.0:
                pts_x[m] = xb; pts_y[m] = float(j); m += 1
            if yr >= 0.0:
                pts_x[m] = float(i + 1); pts_y[m] = yr; m += 1
            if xt >= 0.0:
                pts_x[m] = xt; pts_y[m] = float(j + 1); m += 1
            if yl >= 0.0:
                pts_x[m] = float(i); pts_y[m] = yl; m += 1
            if m >= 2:
                segs[n, 0] = pts_x[0]; segs[n, 1] = pts_y[0]
                segs[n, 2] = pts_x[1]; segs[n, 3] = pts_y[1]
                n += 1
            if m == 4:  # ambiguous saddle: connect remaining pair
                segs[n, 0] = pts_x[2]; segs[n, 1] = pts_y[2]
                segs[n, 2] = pts_x[3]; segs[n, 3] = pts_y[3]
                n += 1
    return segs[:n]


@njit(cache=True)
def line_roots_monotone(r, u_lines, levels):
    """Roots of u_lines[j](r) = levels[k] along each radial line by bisection.

    u_lines: (n_t, n_r) strictly increasing samples along r. Uses cubic Hermite
    interpolation with finite-difference slopes inside the bracketing cell, so
    roots vary smoothly with the level. Returns (n_levels, n_t) radii, nan where
    the level is out of range on that line.
    """
    n_t, n_r = u_lines.shape
    n_l = levels.shape[0]
    out = np.full((n_l, n_t), np.nan)
    for j in range(n_t):
        col = u_lines[j]
        for k in range(n_l):
            lev = levels[k]
            if lev <= col[0] or lev >= col[n_r - 1]:
                continue
            lo = 0
            hi = n_r - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if col[mid] < lev:
                    lo = mid
                else:
                    hi = mid
            h = r[lo + 1] - r[lo]
            f0 = col[lo]
            f1 = col[lo + 1]
            # one-sided slopes at cell ends (centered where possible)
            if lo > 0:
                m0 = (col[lo + 1] - col[lo - 1]) / (r[lo + 1] - r[lo - 1])
            else:
                m0 = (f1 - f0) / h
            if lo + 2 < n_r:
                m1 = (col[lo + 2] - col[lo]) / (r[lo + 2] - r[lo])
            else:
                m1 = (f1 - f0) / h
            a = 0.0
            b = 1.0
            for _ in range(60):
                s = 0.5 * (a + b)
                h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
                h10 = s * (1.0 - s) ** 2
                h01 = s * s * (3.0 - 2.0 * s)
                h11 = s * s * (s - 1.0)
                val = h00 * f0 + h10 * h * m0 + h01 * f1 + h11 * h * m1 - lev
                if val < 0.0:
                    a = s
                else:
                    b = s
            out[k, j] = r[lo] + 0.5 * (a + b) * h
    return out


@njit(cache=True)
def cumulative_simpson(y, h):
    """Cumulative integral of uniformly sampled y, 4th-order.

    Composite Simpson on even prefixes; odd prefixes add a cubic-fit half panel.
    Matches scipy.integrate.cumulative_simpson(initial=0) to rounding.
    """
    n = y.shape[0]
    out = np.zeros(n, dtype=np.float64)
    for i in range(1, n):
        if i % 2 == 0:
            out[i] = out[i - 2] + h / 3.0 * (y[i - 2] + 4.0 * y[i - 1] + y[i])
        else:
            if i == 1:
                # cubic through first four points, integrated over [0, h]
                if n >= 4:
                    out[1] = h / 24.0 * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3])
                else:
                    out[1] = 0.5 * h * (y[0] + y[1])
            else:
                if i + 1 < n:
                    out[i] = out[i - 1] + h / 24.0 * (
                        -y[i - 2] + 13.0 * y[i - 1] + 13.0 * y[i] - y[i + 1]
                    )
                else:
                    out[i] = out[i - 1] + h / 24.0 * (
                        y[i - 3] - 5.0 * y[i - 2] + 19.0 * y[i - 1] + 9.0 * y[i]
                    )
    return out


def warmup():
    """Trigger jit compilation of every kernel (no-op on the numpy path)."""
    a = np.ones((4, 4))
    assemble_flux_stencil(a, a, 0.1, 0.1, 2.0)
    apply_flux_stencil(a, a, 0.1, 0.1, a)
    marching_segments(np.add.outer(np.arange(4.0), np.arange(4.0)), 2.5)
    line_roots_monotone(
        np.linspace(0.0, 1.0, 8),
        np.tile(np.linspace(0.0, 1.0, 8), (3, 1)),
        np.array([0.5]),
    )
    cumulative_simpson(np.ones(9), 0.1)
