"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``GRF_TOOLKIT_PURE=1`` is set.
"""
import math

import numpy as np

_INF = 1 << 62


def _lower_envelope(f, n):
    d = [_INF] * n
    first = next((q for q in range(n) if f[q] < _INF), -1)
    if first < 0:
        return d
    v = [0] * (n + 1)
    z = [0.0] * (n + 2)
    k = 0
    v[0] = first
    z[0] = -math.inf
    z[1] = math.inf
    for q in range(first + 1, n):
        fq = f[q]
        if fq >= _INF:
            continue
        while True:
            vk = v[k]
            s = ((fq + q * q) - (f[vk] + vk * vk)) / (2.0 * (q - vk))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = math.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        vk = v[k]
        d[q] = (q - vk) * (q - vk) + f[vk]
    return d


def edt_sq(mask):
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    # column pass, vectorised across columns
    fwd = np.full((h, w), _INF, dtype=np.int64)
    last = np.full(w, -1, dtype=np.int64)
    for y in range(h):
        last = np.where(mask[y], y, last)
        fwd[y] = np.where(last >= 0, y - last, _INF)
    last = np.full(w, -1, dtype=np.int64)
    for y in range(h - 1, -1, -1):
        last = np.where(mask[y], y, last)
        fwd[y] = np.where((last >= 0) & (last - y < fwd[y]), last - y, fwd[y])
    g = np.where(fwd < _INF, fwd * fwd, _INF)

    out = np.empty((h, w), dtype=np.int64)
    for y in range(h):
        out[y] = _lower_envelope(g[y].tolist(), w)
    return out


def polar_normals(raw, out, start):
    raw = np.asarray(raw, dtype=np.uint64)
    n = out.shape[0]
    npairs = raw.shape[0] // 2
    u = (raw[: 2 * npairs] >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
    u = 2.0 * u - 1.0
    u1, u2 = u[0::2], u[1::2]
    s = u1 * u1 + u2 * u2
    ok = np.flatnonzero((s < 1.0) & (s != 0.0))
    need = n - start
    take = ok[: (need + 1) // 2]
    if take.size == 0:
        return start, 2 * npairs
    st = s[take]
    # libm log, as the compiled kernel uses; numpy's SIMD log can differ by an ulp
    logs = np.fromiter(map(math.log, st.tolist()), dtype=np.float64, count=st.size)
    fac = np.sqrt(-2.0 * logs / st)
    pairs = np.empty(2 * take.size)
    pairs[0::2] = u1[take] * fac
    pairs[1::2] = u2[take] * fac
    filled = min(need, pairs.size)
    out[start:start + filled] = pairs[:filled]
    if filled == need:
        consumed = 2 * (int(take[-1]) + 1)
    else:
        consumed = 2 * npairs
    return start + filled, consumed
