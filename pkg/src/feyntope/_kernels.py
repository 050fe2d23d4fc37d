"""Hot loops, each in a numba and a pure numpy flavour.

The public entry points at the bottom dispatch on :func:`_accel.backend`.
Both flavours compute the same quantity; the numpy one is vectorised so
the fallback stays usable rather than merely correct.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import _accel
from ._accel import njit

# -- exact facet candidates ---------------------------------------------------


@njit
def _det_int(m):
    # Bareiss on an int64 copy
    a = m.copy()
    n = a.shape[0]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k, k] == 0:
            swap = -1
            for r in range(k + 1, n):
                if a[r, k] != 0:
                    swap = r
                    break
            if swap < 0:
                return 0
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[swap, j]
                a[swap, j] = tmp
            sign = -sign
        akk = a[k, k]
        for i in range(k + 1, n):
            aik = a[i, k]
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * akk - aik * a[k, j]) // prev
            a[i, k] = 0
        prev = akk
    return sign * a[n - 1, n - 1]


@njit
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit
def _facets_numba(pts, max_out):
    npts, d = pts.shape
    out = np.zeros((max_out, d), np.int64)
    count = 0
    k = d - 1
    idx = np.arange(k)
    minor = np.empty((k, k), np.int64)
    normal = np.empty(d, np.int64)
    if k == 0 or npts < k:
        return out, 0
    while True:
        nonzero = False
        for col in range(d):
            for r in range(k):
                c2 = 0
                for c in range(d):
                    if c != col:
                        minor[r, c2] = pts[idx[r], c]
                        c2 += 1
            v = _det_int(minor)
            normal[col] = v if col % 2 == 0 else -v
            if normal[col] != 0:
                nonzero = True
        if nonzero:
            pos = False
            neg = False
            for j in range(npts):
                s = 0
                for c in range(d):
                    s += normal[c] * pts[j, c]
                if s > 0:
                    pos = True
                elif s < 0:
                    neg = True
                if pos and neg:
                    break
            if not (pos and neg):
                g = 0
                for c in range(d):
                    g = _gcd(g, normal[c])
                flip = -1 if neg else 1
                for c in range(d):
                    normal[c] = flip * normal[c] // g
                seen = False
                for r in range(count):
                    same = True
                    for c in range(d):
                        if out[r, c] != normal[c]:
                            same = False
                            break
                    if same:
                        seen = True
                        break
                if not seen:
                    if count == max_out:
                        return out, -1
                    out[count, :] = normal
                    count += 1
        # next combination in lexicographic order
        i = k - 1
        while i >= 0 and idx[i] == npts - k + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1
    return out, count


def _facets_numpy(pts: np.ndarray, chunk: int = 20000) -> np.ndarray:
    npts, d = pts.shape
    k = d - 1
    found = []
    combos_iter = itertools.combinations(range(npts), k)
    cols = [np.array([c for c in range(d) if c != col]) for col in range(d)]
    while True:
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos_iter, chunk)), dtype=np.int64
        )
        if block.size == 0:
            break
        combos = block.reshape(-1, k)
        sub = pts[combos].astype(np.float64)  # (M, k, d)
        normals = np.empty((combos.shape[0], d), np.int64)
        for col in range(d):
            det = np.linalg.det(sub[:, :, cols[col]]) if k else np.ones(combos.shape[0])
            normals[:, col] = np.rint(det).astype(np.int64) * (1 if col % 2 == 0 else -1)
        normals = normals[np.any(normals != 0, axis=1)]
        pair = normals @ pts.T
        pos = (pair >= 0).all(axis=1)
        neg = (pair <= 0).all(axis=1)
        normals = np.where(neg[:, None] & ~pos[:, None], -normals, normals)[pos | neg]
        if normals.size:
            g = np.gcd.reduce(np.abs(normals), axis=1)
            found.append(normals // g[:, None])
    if not found:
        return np.zeros((0, d), np.int64)
    allf = np.concatenate(found)
    _, first = np.unique(allf, axis=0, return_index=True)
    return allf[np.sort(first)]


def facet_candidates(points) -> np.ndarray:
    """Primitive inward normals of the cone over ``points`` (rows of ``Z^d``).

    Every ``d-1`` subset spanning a hyperplane through the origin is tested
    for being a supporting hyperplane; exhaustive and exact for small inputs.
    """
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.int64))
    if _accel.backend() == "numba":
        cap = 64
        while True:
            out, count = _facets_numba(pts, cap)
            if count >= 0:
                return out[:count].copy()
            cap *= 4
    return _facets_numpy(pts)


# -- K integrand on a tensor grid -------------------------------------------
#
# In x-space (t = e^x) the integrand is exp(phi(x)) with
#   phi(x) = a_t . x - alpha0 * lse(x),   lse(x) = log sum_a P_a exp(a_t . x)
# and the eps-derivative weight is lw(x) = u_t . x - u0 * lse(x).
# Grid nodes are x = center + L y with y_i taken from the 1-d node list Y.


@njit
def _k_level_numba(center, chol, at, logp, a_t, alpha0, u_t, u0, phi_star, ys, js, even, kmax, skip_even):
    m = ys.shape[0]
    n = center.shape[0]
    npts = at.shape[0]
    sums = np.zeros(kmax + 1)
    abs_sums = np.zeros(kmax + 1)
    shell = 0.0
    count = 0
    y = np.empty(n)
    x = np.empty(n)
    e = np.empty(npts)
    total = 1
    for i in range(n):
        total *= m
    for lin in range(total):
        r = lin
        all_even = True
        on_shell = False
        w = 1.0
        for i in range(n):
            k = r % m
            r //= m
            y[i] = ys[k]
            w *= js[k]
            if not even[k]:
                all_even = False
            if k == 0 or k == m - 1:
                on_shell = True
        if skip_even and all_even:
            continue
        count += 1
        for i in range(n):
            s = center[i]
            for j in range(n):
                s += chol[i, j] * y[j]
            x[i] = s
        mx = -np.inf
        for a in range(npts):
            s = logp[a]
            for i in range(n):
                s += at[a, i] * x[i]
            e[a] = s
            if s > mx:
                mx = s
        acc = 0.0
        for a in range(npts):
            acc += np.exp(e[a] - mx)
        lse = mx + np.log(acc)
        phi = -alpha0 * lse - phi_star
        lw = -u0 * lse
        for i in range(n):
            phi += a_t[i] * x[i]
            lw += u_t[i] * x[i]
        f = np.exp(phi) * w
        if f == 0.0:
            continue
        t = f
        for k in range(kmax + 1):
            sums[k] += t
            abs_sums[k] += abs(t)
            t *= lw / (k + 1)
        if on_shell:
            shell += f
    return sums, abs_sums, shell, count


def _k_level_numpy(center, chol, at, logp, a_t, alpha0, u_t, u0, phi_star, ys, js, even, kmax, skip_even,
                   chunk=1 << 16):
    m = ys.shape[0]
    n = center.shape[0]
    total = m**n
    sums = np.zeros(kmax + 1)
    abs_sums = np.zeros(kmax + 1)
    shell = 0.0
    count = 0
    powers = m ** np.arange(n)
    for start in range(0, total, chunk):
        lin = np.arange(start, min(start + chunk, total))
        idx = (lin[:, None] // powers[None, :]) % m  # (M, n)
        if skip_even:
            keep = ~np.all(even[idx], axis=1)
            idx = idx[keep]
            if idx.shape[0] == 0:
                continue
        count += idx.shape[0]
        y = ys[idx]
        w = np.prod(js[idx], axis=1)
        x = center[None, :] + y @ chol.T
        e = x @ at.T + logp[None, :]
        mx = e.max(axis=1)
        lse = mx + np.log(np.exp(e - mx[:, None]).sum(axis=1))
        f = np.exp(x @ a_t - alpha0 * lse - phi_star) * w
        lw = x @ u_t - u0 * lse
        t = f
        for k in range(kmax + 1):
            sums[k] += t.sum()
            abs_sums[k] += np.abs(t).sum()
            t = t * lw / (k + 1)
        on_shell = np.any((idx == 0) | (idx == m - 1), axis=1)
        shell += f[on_shell].sum()
    return sums, abs_sums, shell, count


def k_level_sums(*args):
    """Raw node sums of one DE level: ``(sums[k], abs_sums[k], shell, evals)``."""
    if _accel.backend() == "numba":
        return _k_level_numba(*args)
    return _k_level_numpy(*args)


# -- K integrand on a batch of points (Monte Carlo) ---------------------------


@njit
def _k_batch_numba(x, at, logp, a_t, alpha0, u_t, u0):
    npts_s = x.shape[0]
    n = x.shape[1]
    npts = at.shape[0]
    phi = np.empty(npts_s)
    lw = np.empty(npts_s)
    e = np.empty(npts)
    for s_i in range(npts_s):
        mx = -np.inf
        for a in range(npts):
            s = logp[a]
            for i in range(n):
                s += at[a, i] * x[s_i, i]
            e[a] = s
            if s > mx:
                mx = s
        acc = 0.0
        for a in range(npts):
            acc += np.exp(e[a] - mx)
        lse = mx + np.log(acc)
        p = -alpha0 * lse
        q = -u0 * lse
        for i in range(n):
            p += a_t[i] * x[s_i, i]
            q += u_t[i] * x[s_i, i]
        phi[s_i] = p
        lw[s_i] = q
    return phi, lw


def _k_batch_numpy(x, at, logp, a_t, alpha0, u_t, u0):
    e = x @ at.T + logp[None, :]
    mx = e.max(axis=1)
    lse = mx + np.log(np.exp(e - mx[:, None]).sum(axis=1))
    return x @ a_t - alpha0 * lse, x @ u_t - u0 * lse


def k_log_integrand(x, at, logp, a_t, alpha0, u_t, u0):
    """``(phi, lw)`` at each row of ``x``."""
    if _accel.backend() == "numba":
        return _k_batch_numba(x, at, logp, a_t, alpha0, u_t, u0)
    return _k_batch_numpy(x, at, logp, a_t, alpha0, u_t, u0)


# -- momentum-space propagator product ----------------------------------------


@njit
def _propagators_numba(k, cyc, qpart, mass2, dim):
    # k: (S, L*dim) loop momenta, cyc: (E, L), qpart: (E, dim)
    ns = k.shape[0]
    ne = cyc.shape[0]
    nl = cyc.shape[1]
    out = np.empty(ns)
    for s in range(ns):
        prod = 1.0
        for e in range(ne):
            q2 = 0.0
            for c in range(dim):
                q = qpart[e, c]
                for j in range(nl):
                    q += cyc[e, j] * k[s, j * dim + c]
                q2 += q * q
            prod *= 1.0 / (q2 + mass2[e])
        out[s] = prod
    return out


def _propagators_numpy(k, cyc, qpart, mass2, dim):
    ns = k.shape[0]
    nl = cyc.shape[1]
    kk = k.reshape(ns, nl, dim)
    q = np.einsum("ej,sjc->sec", cyc, kk) + qpart[None, :, :]
    return np.prod(1.0 / ((q * q).sum(axis=2) + mass2[None, :]), axis=1)


def propagator_product(k, cyc, qpart, mass2, dim):
    if _accel.backend() == "numba":
        return _propagators_numba(k, cyc, qpart, mass2, dim)
    return _propagators_numpy(k, cyc, qpart, mass2, dim)
