"""Pure-Python scan kernels.

Fallback for the compiled extension in ``_kernels.pyx``.  Both
implementations must produce identical outputs for identical inputs;
``tests/test_kernels.py`` enforces this.  The uncorrelated case is
vectorised with numpy, the correlated case is a plain sequential scan.
"""

import math

import numpy as np


def sticky_scan(u_fresh, u_repeat, rate, corr, prev):
    """First-order sticky Bernoulli process.

    Outcome i repeats outcome i-1 with probability ``corr`` (decided by
    ``u_repeat[i]``), otherwise it is a fresh draw ``u_fresh[i] < rate``.
    ``prev`` is the outcome carried over from an earlier chunk (-1 when
    there is none).  Returns (uint8 array of outcomes, last outcome).
    """
    n = len(u_fresh)
    if n == 0:
        return np.empty(0, dtype=np.uint8), prev
    if corr == 0.0:
        # u_repeat < 0.0 never fires, so every draw is fresh.
        out = (u_fresh < rate).astype(np.uint8)
        return out, int(out[-1])
    out = np.empty(n, dtype=np.uint8)
    uf = u_fresh
    ur = u_repeat
    p = prev
    for i in range(n):
        if p != -1 and ur[i] < corr:
            cur = p
        else:
            cur = 1 if uf[i] < rate else 0
        out[i] = cur
        p = cur
    return out, p


def ar1_scan(eps, corr, prev, has_prev):
    """AR(1) scan: x[i] = corr * x[i-1] + sqrt(1 - corr^2) * eps[i].

    The first element is taken verbatim from ``eps`` when ``has_prev``
    is false, so a chunked scan continues an earlier one exactly.
    Returns (float64 array, last value).
    """
    n = len(eps)
    if n == 0:
        return np.empty(0, dtype=np.float64), prev
    if corr == 0.0:
        # Value-identical to the scan (adding 0.0 normalises -0.0).
        out = eps + 0.0
        return out, float(out[-1])
    s = math.sqrt(1.0 - corr * corr)
    out = np.empty(n, dtype=np.float64)
    start = 0
    x = prev
    if not has_prev:
        x = float(eps[0])
        out[0] = x
        start = 1
    for i in range(start, n):
        a = corr * x
        b = s * float(eps[i])
        x = a + b
        out[i] = x
    return out, x
