"""Hot integer kernels for configuration enumeration and generator assembly.

Configurations of the L-site ring are packed base-3 integers, site 0 in the
most significant trit (so ascending packed order is lexicographic in the
site list): A=0, B=1, vacancy=2.  Translation moves the content of site j
to site j+1.

Kernels are numba @njit compiled by default; set the environment variable
``TASEP2_NO_NUMBA=1`` before import to select the pure-Python/numpy fallback
(same signatures, same outputs).  ``benchmarks/bench_kernels.py`` compares
the two paths.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("TASEP2_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USE_NUMBA = False

if not USE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        def wrap(f):
            return f
        return wrap


@njit(cache=True)
def _digit_counts(x, length):
    n_a = 0
    n_b = 0
    for _ in range(length):
        d = x % 3
        if d == 0:
            n_a += 1
        elif d == 1:
            n_b += 1
        x //= 3
    return n_a, n_b


@njit(cache=True)
def enumerate_packed(length, n_a, n_b):
    """All packed codes with the given particle counts, ascending."""
    total = 3 ** length
    out = np.empty(3 ** length, dtype=np.int64)
    n = 0
    for x in range(total):
        a, b = _digit_counts(x, length)
        if a == n_a and b == n_b:
            out[n] = x
            n += 1
    return out[:n]


@njit(cache=True)
def _bisect(packs, x):
    lo = 0
    hi = packs.size
    while lo < hi:
        mid = (lo + hi) // 2
        if packs[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def assemble_moves(length, packs, gamma_r, gamma_l):
    """COO data of the master-equation generator on the given configurations.

    Column convention: for every nearest-neighbour exchange c -> c' at rate
    rho, entry (row=c', col=c) gets -rho and the diagonal (c, c) gets +rho.
    Returns (rows, cols, vals) including diagonal entries, unsorted.
    """
    n = packs.size
    cap = n * (length + 1)
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    vals = np.empty(cap, dtype=np.float64)
    p3 = np.empty(length + 1, dtype=np.int64)
    p3[0] = 1
    for j in range(length):
        p3[j + 1] = 3 * p3[j]
    m = 0
    for i in range(n):
        x = packs[i]
        diag = 0.0
        for j in range(length):
            eg = length - 1 - j            # exponent of site j
            ed = eg - 1 if j < length - 1 else length - 1
            g = (x // p3[eg]) % 3
            d = (x // p3[ed]) % 3
            if g == d:
                continue
            rate = gamma_r if g < d else gamma_l
            if rate == 0.0:
                continue
            y = x + (d - g) * p3[eg] + (g - d) * p3[ed]
            k = _bisect(packs, y)
            rows[m] = k
            cols[m] = i
            vals[m] = -rate
            m += 1
            diag += rate
        if diag != 0.0:
            rows[m] = i
            cols[m] = i
            vals[m] = diag
            m += 1
    return rows[:m], cols[:m], vals[:m]


@njit(cache=True)
def translate_packed(x, length):
    """Shift content of every site one step to the right (site j -> j+1)."""
    return x // 3 + (x % 3) * 3 ** (length - 1)


@njit(cache=True)
def orbit_table(length, packs):
    """Translation orbits over a sorted configuration table.

    Returns (rep, shift, period) per configuration index: rep is the index of
    the orbit representative (minimal packed code), shift the number of
    translations taking the configuration onto the representative, period the
    orbit length.
    """
    n = packs.size
    rep = np.full(n, -1, dtype=np.int64)
    shift = np.zeros(n, dtype=np.int64)
    period = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if rep[i] >= 0:
            continue
        x = packs[i]
        best = x
        per = 0
        t = x
        for s in range(1, length + 1):
            t = translate_packed(t, length)
            if t == x:
                per = s
                break
            if t < best:
                best = t
        ib = _bisect(packs, best)
        t = x
        members = np.empty(per, dtype=np.int64)
        members[0] = i
        for s in range(1, per):
            t = translate_packed(t, length)
            members[s] = _bisect(packs, t)
        # shift s maps member -> T^s(member); want t with T^t(member) = rep
        srep = 0
        for s in range(per):
            if members[s] == ib:
                srep = s
                break
        for s in range(per):
            idx = members[s]
            rep[idx] = ib
            shift[idx] = (srep - s) % per
            period[idx] = per
    return rep, shift, period
