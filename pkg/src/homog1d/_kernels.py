"""Compiled inner loops for the path simulator.

Each path owns a counter-based random stream keyed by (master seed,
path index), so path i sees the same draws no matter how paths are
batched or how many threads run.  The stream is the standard 4x64
10-round counter-based generator; `_raw_stream` below reproduces
numpy's Philox bit generator word for word, which the test suite
checks directly.  Normals are produced from the raw words by the
Box-Muller transform, four per block.

The drift a'(x/eps)/eps and noise amplitude sqrt(2 a(x/eps)) enter the
step through linearly interpolated tables sampled on one period, and
the source term through a table on [0, 1].  Table resolution is chosen
by the caller so interpolation error sits far below Monte Carlo noise.
"""

import numba
import numpy as np
from numba import njit, prange

# the portable threading layer avoids probing optional backends (TBB,
# OpenMP) that may be absent or stale in the deployment image
numba.config.THREADING_LAYER = "workqueue"

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_U1 = np.uint64(1)
_TWO53 = 9007199254740992.0  # 2**53
_TWO_PI = 6.283185307179586


@njit(cache=True, inline="always")
def _mulhilo(a, b):
    """128-bit product of two uint64 values as (high word, low word)."""
    lo = a * b
    al = a & _MASK32
    ah = a >> _S32
    bl = b & _MASK32
    bh = b >> _S32
    ahbl = ah * bl
    albh = al * bh
    mid = ((al * bl) >> _S32) + (ahbl & _MASK32) + (albh & _MASK32)
    hi = ah * bh + (ahbl >> _S32) + (albh >> _S32) + (mid >> _S32)
    return hi, lo


@njit(cache=True, inline="always")
def _block(c0, c1, c2, c3, k0, k1):
    """One 4x64 counter block: ten rounds with key bumps in between."""
    for _ in range(10):
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = k0 + _W0
        k1 = k1 + _W1
    return c0, c1, c2, c3


@njit(cache=True)
def _raw_stream(seed, path, n):
    """First n raw words of the stream keyed (seed, path).

    Matches numpy's Philox bit generator with key=[seed, path]: the
    counter is bumped before each block, so the first block is drawn
    at counter 1.
    """
    out = np.empty(n, np.uint64)
    ctr = np.uint64(0)
    k0 = np.uint64(seed)
    k1 = np.uint64(path)
    pos = 4
    w0 = np.uint64(0)
    w1 = np.uint64(0)
    w2 = np.uint64(0)
    w3 = np.uint64(0)
    for i in range(n):
        if pos == 4:
            ctr = ctr + _U1
            w0, w1, w2, w3 = _block(ctr, np.uint64(0), np.uint64(0), np.uint64(0), k0, k1)
            pos = 0
        if pos == 0:
            out[i] = w0
        elif pos == 1:
            out[i] = w1
        elif pos == 2:
            out[i] = w2
        else:
            out[i] = w3
        pos += 1
    return out


@njit(cache=True, inline="always")
def _normals_from_block(w0, w1, w2, w3):
    """Four standard normals from one raw block via Box-Muller."""
    u1 = (float(w0 >> _S11) + 1.0) / _TWO53
    u2 = float(w1 >> _S11) / _TWO53
    r = np.sqrt(-2.0 * np.log(u1))
    ang = _TWO_PI * u2
    z0 = r * np.cos(ang)
    z1 = r * np.sin(ang)
    u3 = (float(w2 >> _S11) + 1.0) / _TWO53
    u4 = float(w3 >> _S11) / _TWO53
    r2 = np.sqrt(-2.0 * np.log(u3))
    ang2 = _TWO_PI * u4
    z2 = r2 * np.cos(ang2)
    z3 = r2 * np.sin(ang2)
    return z0, z1, z2, z3


@njit(cache=True)
def path_normals(seed, path, n):
    """First n normal draws of path `path` (test/oracle helper)."""
    out = np.empty(n)
    ctr = np.uint64(0)
    k0 = np.uint64(seed)
    k1 = np.uint64(path)
    buf = np.empty(4)
    pos = 4
    for i in range(n):
        if pos == 4:
            ctr = ctr + _U1
            w0, w1, w2, w3 = _block(ctr, np.uint64(0), np.uint64(0), np.uint64(0), k0, k1)
            buf[0], buf[1], buf[2], buf[3] = _normals_from_block(w0, w1, w2, w3)
            pos = 0
        out[i] = buf[pos]
        pos += 1
    return out


@njit(cache=True, parallel=True)
def simulate(x0, n_paths, n_steps, dt, inv_eps, seed, path_offset,
             drift_tab, sigma_tab, f_tab, noise_scale):
    """Euler-Maruyama ensemble on (0, 1) with absorbing endpoints.

    drift_tab and sigma_tab sample a'(u)/1 and sqrt(2 a(u)) over one
    period u in [0, 1]; f_tab samples the source over [0, 1].  Returns
    final positions (clamped to the endpoint on absorption), the
    accumulated source integral up to absorption, and the step index
    at which each path was absorbed (-1 if still interior).
    """
    xs = np.empty(n_paths)
    fint = np.zeros(n_paths)
    exit_step = np.full(n_paths, -1, np.int64)
    nc = drift_tab.size - 1
    nf = f_tab.size - 1
    sqdt = np.sqrt(dt)
    for i in prange(n_paths):
        k0 = np.uint64(seed)
        k1 = np.uint64(path_offset + i)
        ctr = np.uint64(0)
        z0 = 0.0
        z1 = 0.0
        z2 = 0.0
        z3 = 0.0
        pos = 4
        x = x0
        acc = 0.0
        for s in range(n_steps):
            if pos == 4:
                ctr = ctr + _U1
                w0, w1, w2, w3 = _block(ctr, np.uint64(0), np.uint64(0), np.uint64(0), k0, k1)
                z0, z1, z2, z3 = _normals_from_block(w0, w1, w2, w3)
                pos = 0
            if pos == 0:
                z = z0
            elif pos == 1:
                z = z1
            elif pos == 2:
                z = z2
            else:
                z = z3
            pos += 1

            # source accrues at the pre-step state, so accrual stops
            # with the step on which the path is absorbed
            pf = x * nf
            jf = int(pf)
            if jf > nf - 1:
                jf = nf - 1
            wf = pf - jf
            acc += ((1.0 - wf) * f_tab[jf] + wf * f_tab[jf + 1]) * dt

            u = x * inv_eps
            u -= np.floor(u)
            pc = u * nc
            jc = int(pc)
            if jc > nc - 1:
                jc = nc - 1
            wc = pc - jc
            drift = (1.0 - wc) * drift_tab[jc] + wc * drift_tab[jc + 1]
            sigma = (1.0 - wc) * sigma_tab[jc] + wc * sigma_tab[jc + 1]

            x = x + drift * inv_eps * dt + noise_scale * sigma * sqdt * z
            if x <= 0.0:
                x = 0.0
                exit_step[i] = s + 1
                break
            if x >= 1.0:
                x = 1.0
                exit_step[i] = s + 1
                break
        xs[i] = x
        fint[i] = acc
    return xs, fint, exit_step
