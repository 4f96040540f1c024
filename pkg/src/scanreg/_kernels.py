"""Jitted numerical kernels.

Hot paths only: the alternating-projection sweep loop, the two closed-form
minimal solvers, polynomial root finding, and batched segment distances. The
public modules wrap these with validated types; keep signatures array-based.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_PARALLEL_TOL = 1e-12


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True)
def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit(cache=True)
def seg_closest(a1, b1, a2, b2):
    """Closest points of two segments; mirrors geometry._closest_params."""
    d1 = b1 - a1
    d2 = b2 - a2
    r = a1 - a2
    a = _dot(d1, d1)
    e = _dot(d2, d2)
    b = _dot(d1, d2)
    c = _dot(d1, r)
    f = _dot(d2, r)
    denom = a * e - b * b
    if denom > _PARALLEL_TOL * a * e:
        s = (b * f - c * e) / denom
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        t = (b * s + f) / e
        if t < 0.0:
            t = 0.0
            s = -c / a
        elif t > 1.0:
            t = 1.0
            s = (b - c) / a
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
    else:
        t0 = _dot(a2 - a1, d1) / a
        t1 = _dot(b2 - a1, d1) / a
        lo = max(0.0, min(t0, t1))
        hi = min(1.0, max(t0, t1))
        if lo <= hi:
            s = 0.5 * (lo + hi)
        else:
            s = 1.0 if min(t0, t1) > 1.0 else 0.0
        p1 = a1 + s * d1
        t = _dot(p1 - a2, d2) / e
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    p1 = a1 + s * d1
    p2 = a2 + t * d2
    return p1, p2

@njit(cache=True)
def seg_distance(a1, b1, a2, b2):
    p1, p2 = seg_closest(a1, b1, a2, b2)
    d = p1 - p2
    return np.sqrt(_dot(d, d))


@njit(cache=True)
def cross_distances(a1, b1, a2, b2):
    """Distance matrix (n1, n2) between two segment sets."""
    n1 = a1.shape[0]
    n2 = a2.shape[0]
    out = np.empty((n1, n2))
    for i in range(n1):
        for j in range(n2):
            out[i, j] = seg_distance(a1[i], b1[i], a2[j], b2[j])
    return out


@njit(cache=True)
def fit_rigid(src, dst):
    """Procrustes without degeneracy checks; callers must pre-validate."""
    n = src.shape[0]
    cs = np.zeros(3)
    cd = np.zeros(3)
    for i in range(n):
        for j in range(3):
            cs[j] += src[i, j]
            cd[j] += dst[i, j]
    cs /= n
    cd /= n
    h = np.zeros((3, 3))
    for i in range(n):
        for j in range(3):
            sj = src[i, j] - cs[j]
            for k in range(3):
                h[j, k] += sj * (dst[i, k] - cd[k])
    u, s, vt = np.linalg.svd(h)
    v = vt.T
    ut = u.T
    d = np.linalg.det(v @ ut)
    if d < 0.0:
        v = v.copy()
        v[:, 2] = -v[:, 2]
    r = v @ ut
    t = cd - r @ cs
    return r, t


@njit(cache=True)
def ap_run(oa1, ob1, oa2, ob2, eps, max_iters, relax, upd_hist, pose_hist, record_poses):
    """Alternating projection over segment pairs.

    oa1/ob1: (N, 3) endpoints of frame-1 segments; oa2/ob2 frame 2. One sweep
    translates each pair's segments toward each other by half the closest-point
    gap, then re-rigidifies each frame onto its originals by Procrustes.
    Terminates when the largest endpoint move in a sweep drops below eps.

    Returns (r1, t1, r2, t2, sweeps, last_update, converged).
    """
    n = oa1.shape[0]
    wa1 = oa1.copy()
    wb1 = ob1.copy()
    wa2 = oa2.copy()
    wb2 = ob2.copy()
    orig1 = np.empty((2 * n, 3))
    orig2 = np.empty((2 * n, 3))
    work1 = np.empty((2 * n, 3))
    work2 = np.empty((2 * n, 3))
    for i in range(n):
        for j in range(3):
            orig1[i, j] = oa1[i, j]
            orig1[n + i, j] = ob1[i, j]
            orig2[i, j] = oa2[i, j]
            orig2[n + i, j] = ob2[i, j]
    r1 = np.eye(3)
    t1 = np.zeros(3)
    r2 = np.eye(3)
    t2 = np.zeros(3)
    prev1 = orig1.copy()
    prev2 = orig2.copy()
    sweeps = 0
    last_update = np.inf
    converged = False
    half = 0.5 * relax
    for sweep in range(max_iters):
        for i in range(n):
            p1, p2 = seg_closest(wa1[i], wb1[i], wa2[i], wb2[i])
            for j in range(3):
                shift = half * (p2[j] - p1[j])
                wa1[i, j] += shift
                wb1[i, j] += shift
                wa2[i, j] -= shift
                wb2[i, j] -= shift
        for i in range(n):
            for j in range(3):
                work1[i, j] = wa1[i, j]
                work1[n + i, j] = wb1[i, j]
                work2[i, j] = wa2[i, j]
                work2[n + i, j] = wb2[i, j]
        r1, t1 = fit_rigid(orig1, work1)
        r2, t2 = fit_rigid(orig2, work2)
        upd = 0.0
        for i in range(2 * n):
            x1 = 0.0
            x2 = 0.0
            w1_0 = r1[0, 0] * orig1[i, 0] + r1[0, 1] * orig1[i, 1] + r1[0, 2] * orig1[i, 2] + t1[0]
            w1_1 = r1[1, 0] * orig1[i, 0] + r1[1, 1] * orig1[i, 1] + r1[1, 2] * orig1[i, 2] + t1[1]
            w1_2 = r1[2, 0] * orig1[i, 0] + r1[2, 1] * orig1[i, 1] + r1[2, 2] * orig1[i, 2] + t1[2]
            w2_0 = r2[0, 0] * orig2[i, 0] + r2[0, 1] * orig2[i, 1] + r2[0, 2] * orig2[i, 2] + t2[0]
            w2_1 = r2[1, 0] * orig2[i, 0] + r2[1, 1] * orig2[i, 1] + r2[1, 2] * orig2[i, 2] + t2[1]
            w2_2 = r2[2, 0] * orig2[i, 0] + r2[2, 1] * orig2[i, 1] + r2[2, 2] * orig2[i, 2] + t2[2]
            x1 = (
                (w1_0 - prev1[i, 0]) ** 2
                + (w1_1 - prev1[i, 1]) ** 2
                + (w1_2 - prev1[i, 2]) ** 2
            )
            x2 = (
                (w2_0 - prev2[i, 0]) ** 2
                + (w2_1 - prev2[i, 1]) ** 2
                + (w2_2 - prev2[i, 2]) ** 2
            )
            if x1 > upd:
                upd = x1
            if x2 > upd:
                upd = x2
            prev1[i, 0] = w1_0
            prev1[i, 1] = w1_1
            prev1[i, 2] = w1_2
            prev2[i, 0] = w2_0
            prev2[i, 1] = w2_1
            prev2[i, 2] = w2_2
            if i < n:
                wa1[i, 0] = w1_0
                wa1[i, 1] = w1_1
                wa1[i, 2] = w1_2
                wa2[i, 0] = w2_0
                wa2[i, 1] = w2_1
                wa2[i, 2] = w2_2
            else:
                wb1[i - n, 0] = w1_0
                wb1[i - n, 1] = w1_1
                wb1[i - n, 2] = w1_2
                wb2[i - n, 0] = w2_0
                wb2[i - n, 1] = w2_1
                wb2[i - n, 2] = w2_2
        upd = np.sqrt(upd)
        last_update = upd
        upd_hist[sweep] = upd
        sweeps = sweep + 1
        if record_poses:
            rr = r2.T @ r1
            tt = r2.T @ (t1 - t2)
            for j in range(3):
                for k in range(3):
                    pose_hist[sweep, 3 * j + k] = rr[j, k]
                pose_hist[sweep, 9 + j] = tt[j]
        if upd < eps:
            converged = True
            break
    return r1, t1, r2, t2, sweeps, last_update, converged


@njit(cache=True)
def count_weighted_inliers(r, t, sa, sb, ta, tb, weights, inlier_dist):
    """Weighted inlier score of pose (r, t) over candidate segment pairs.

    Frame-A segments (sa, sb) are moved by the pose and matched against
    frame-B segments (ta, tb); a pair is an inlier when the clamped
    segment-segment distance is at most inlier_dist.
    """
    n = sa.shape[0]
    mask = np.zeros(n, np.bool_)
    score = 0.0
    a = np.empty(3)
    b = np.empty(3)
    for i in range(n):
        for j in range(3):
            a[j] = r[j, 0] * sa[i, 0] + r[j, 1] * sa[i, 1] + r[j, 2] * sa[i, 2] + t[j]
            b[j] = r[j, 0] * sb[i, 0] + r[j, 1] * sb[i, 1] + r[j, 2] * sb[i, 2] + t[j]
        if seg_distance(a, b, ta[i], tb[i]) <= inlier_dist:
            mask[i] = True
            score += weights[i]
    return score, mask


@njit(cache=True)
def _polish_root(coeffs, x):
    """One Newton step on the polynomial with descending coefficients."""
    p = 0.0
    dp = 0.0
    for c in coeffs:
        dp = dp * x + p
        p = p * x + c
    if abs(dp) > 1e-30:
        x = x - p / dp
    return x


@njit(cache=True)
def poly_real_roots(coeffs_in):
    """All real roots of a degree<=4 polynomial, ascending order.

    Leading coefficients below 1e-12 of the largest magnitude are dropped
    (degree reduction). Degree >= 3 goes through companion-matrix eigenvalues;
    every root gets one Newton polish; duplicates within 1e-10 are merged.

    Returns (roots[4], count); count = -1 flags the all-zero polynomial.
    """
    roots = np.zeros(4)
    scale = 0.0
    for c in coeffs_in:
        if abs(c) > scale:
            scale = abs(c)
    if scale == 0.0:
        return roots, -1
    c = coeffs_in / scale
    first = 0
    while first < len(c) - 1 and abs(c[first]) <= 1e-12:
        first += 1
    cf = c[first:]
    deg = len(cf) - 1
    if deg == 0:
        return roots, 0
    if deg == 1:
        roots[0] = -cf[1] / cf[0]
        return roots, 1
    if deg == 2:
        aa, bb, cc = cf[0], cf[1], cf[2]
        disc = bb * bb - 4.0 * aa * cc
        if disc < 0.0:
            return roots, 0
        sq = np.sqrt(disc)
        q = -0.5 * (bb + sq) if bb >= 0.0 else -0.5 * (bb - sq)
        r0 = q / aa
        if abs(q) > 1e-300:
            r1 = cc / q
        else:
            r1 = r0
        if r0 > r1:
            r0, r1 = r1, r0
        roots[0] = _polish_root(cf, r0)
        roots[1] = _polish_root(cf, r1)
        n = 2
    else:
        # companion matrix of the monic polynomial, complex to allow any spectrum
        comp = np.zeros((deg, deg), np.complex128)
        for i in range(1, deg):
            comp[i, i - 1] = 1.0
        for i in range(deg):
            comp[i, deg - 1] = -cf[deg - i] / cf[0]
        ev = np.linalg.eigvals(comp)
        n = 0
        for i in range(deg):
            re = ev[i].real
            im = ev[i].imag
            if abs(im) <= 1e-9 * (1.0 + abs(re)):
                roots[n] = _polish_root(cf, re)
                n += 1
    # sort (tiny n) and merge duplicates
    for i in range(1, n):
        key = roots[i]
        j = i - 1
        while j >= 0 and roots[j] > key:
            roots[j + 1] = roots[j]
            j -= 1
        roots[j + 1] = key
    m = 0
    for i in range(n):
        if m == 0 or roots[i] - roots[m - 1] > 1e-10:
            roots[m] = roots[i]
            m += 1
    for i in range(m, 4):
        roots[i] = 0.0
    return roots, m


_SIN_1_DEG = 0.01745240643728351


@njit(cache=True)
def canon_plane_xy(n, o):
    """Transform taking plane {n.x + o = 0} to z=0 with normal +z.

    In-plane freedom is fixed by sending the plane's point closest to the
    origin to the origin and aligning the projection of the world x-axis
    (y-axis when the normal is along x) with +x.
    """
    ex = np.empty(3)
    ex[0] = 1.0 - n[0] * n[0]
    ex[1] = -n[0] * n[1]
    ex[2] = -n[0] * n[2]
    if _dot(ex, ex) < 1e-12:
        ex[0] = -n[1] * n[0]
        ex[1] = 1.0 - n[1] * n[1]
        ex[2] = -n[1] * n[2]
    ex /= np.sqrt(_dot(ex, ex))
    ey = _cross(n, ex)
    r = np.empty((3, 3))
    for j in range(3):
        r[0, j] = ex[j]
        r[1, j] = ey[j]
        r[2, j] = n[j]
    t = np.zeros(3)
    t[2] = o
    return r, t


@njit(cache=True)
def canon_two_planes(n1, o1, n2, o2):
    """Transform taking plane 2 to z=0 (+z normal) and the plane-1/plane-2
    intersection line to the x-axis.

    The x direction is normalize(n1 x n2), which makes the transformed normal
    of plane 1 have positive y-component. Returns (ok, r, t); ok is False for
    near-parallel planes (angle below 1 degree).
    """
    cr = _cross(n1, n2)
    s2 = _dot(cr, cr)
    r = np.eye(3)
    t = np.zeros(3)
    if s2 <= _SIN_1_DEG * _SIN_1_DEG:
        return False, r, t
    d = cr / np.sqrt(s2)
    a = np.empty((3, 3))
    for j in range(3):
        a[0, j] = n1[j]
        a[1, j] = n2[j]
        a[2, j] = d[j]
    rhs = np.empty(3)
    rhs[0] = -o1
    rhs[1] = -o2
    rhs[2] = 0.0
    x0 = np.linalg.solve(a, rhs)
    ey = _cross(n2, d)
    for j in range(3):
        r[0, j] = d[j]
        r[1, j] = ey[j]
        r[2, j] = n2[j]
    t = -(r @ x0)
    return True, r, t


@njit(cache=True)
def _line_to_frame(r, t, d, m):
    d2 = r @ d
    m2 = r @ m + _cross(t, d2)
    return d2, m2


@njit(cache=True)
def solve_1l2p(ld, lm, md, mm, n11, o11, n12, o12, n21, o21, n22, o22):
    """One line intersection + two plane correspondences.

    (ld, lm) is the scan-1 line, (md, mm) the scan-2 line; (n11, o11)/(n12, o12)
    the scan-1 plane pair, (n21, o21)/(n22, o22) the corresponding scan-2 pair
    (second plane of each pair goes to the XY plane). Returns (status, r, t):
    status 0 ok, 1 near-parallel planes, 2 line uninformative about the
    remaining x-translation.
    """
    ok1, r1, t1 = canon_two_planes(n11, o11, n12, o12)
    ok2, r2, t2 = canon_two_planes(n21, o21, n22, o22)
    rr = np.eye(3)
    tt = np.zeros(3)
    if not ok1 or not ok2:
        return 1, rr, tt
    d, m = _line_to_frame(r1, t1, ld, lm)
    e, f = _line_to_frame(r2, t2, md, mm)
    alpha = e[2] * d[1] - e[1] * d[2]
    beta = _dot(e, m) + _dot(f, d)
    if abs(alpha) < 1e-9:
        return 2, rr, tt
    tx = -beta / alpha
    rr = r2.T @ r1
    tc = t1.copy()
    tc[0] += tx
    tt = r2.T @ (tc - t2)
    return 0, rr, tt


@njit(cache=True)
def solve_3l1p(ld, lm, md, mm, n1, o1, n1p, o1p):
    """Three line intersections + one plane correspondence.

    ld/lm: (3, 3) directions and moments of the scan-1 lines; md/mm scan 2.
    (n1, o1) and (n1p, o1p) are the corresponding planes, both sent to the XY
    plane, which reduces the pose to (rotation about z, in-plane translation).
    Eliminating the translation from the three intersection constraints leaves
    a quartic in sin(theta); each admissible root is back-substituted and both
    cosine signs are checked against all three constraints.

    Returns (status, count, rs, ts): status 0 ok, 1 degenerate elimination
    (constraints do not determine the pose). count <= 4 poses.
    """
    rs = np.zeros((4, 3, 3))
    ts = np.zeros((4, 3))
    r1, t1 = canon_plane_xy(n1, o1)
    r2, t2 = canon_plane_xy(n1p, o1p)
    a0 = np.empty(3)
    ac = np.empty(3)
    as_ = np.empty(3)
    b0 = np.empty(3)
    bc = np.empty(3)
    bs = np.empty(3)
    c0 = np.empty(3)
    cc = np.empty(3)
    cs = np.empty(3)
    cscale = 0.0
    for i in range(3):
        d, m = _line_to_frame(r1, t1, ld[i], lm[i])
        e, f = _line_to_frame(r2, t2, md[i], mm[i])
        a0[i] = -e[1] * d[2]
        ac[i] = e[2] * d[1]
        as_[i] = e[2] * d[0]
        b0[i] = e[0] * d[2]
        bc[i] = -e[2] * d[0]
        bs[i] = e[2] * d[1]
        c0[i] = e[2] * m[2] + f[2] * d[2]
        cc[i] = e[0] * m[0] + e[1] * m[1] + f[0] * d[0] + f[1] * d[1]
        cs[i] = e[1] * m[0] - e[0] * m[1] + f[1] * d[0] - f[0] * d[1]
        for val in (a0[i], ac[i], as_[i], b0[i], bc[i], bs[i], c0[i], cc[i], cs[i]):
            if abs(val) > cscale:
                cscale = abs(val)
    # det of the 3x3 constraint matrix [A B C](c, s) folded with c^2 + s^2 = 1:
    # P(s) + c Q(s), with P quadratic and Q linear in s
    p0 = 0.0
    p1 = 0.0
    p2 = 0.0
    q0 = 0.0
    q1 = 0.0
    for term in range(3):
        if term == 0:
            sg, ci, j, k = 1.0, 0, 1, 2
        elif term == 1:
            sg, ci, j, k = -1.0, 1, 0, 2
        else:
            sg, ci, j, k = 1.0, 2, 0, 1
        # minor N_jk = A_j B_k - A_k B_j is affine in (c, s) after the fold
        n0 = a0[j] * b0[k] - a0[k] * b0[j] + (ac[j] * bc[k] - ac[k] * bc[j])
        nc = a0[j] * bc[k] + ac[j] * b0[k] - (a0[k] * bc[j] + ac[k] * b0[j])
        ns = a0[j] * bs[k] + as_[j] * b0[k] - (a0[k] * bs[j] + as_[k] * b0[j])
        g = c0[ci]
        u = cc[ci]
        v = cs[ci]
        p0 += sg * (g * n0 + u * nc)
        p1 += sg * (g * ns + v * n0)
        p2 += sg * (v * ns - u * nc)
        q0 += sg * (g * nc + u * n0)
        q1 += sg * (u * ns + v * nc)
    qscale = max(abs(p0), abs(p1), abs(p2), abs(q0), abs(q1))
    ref = max(cscale, 1e-300)
    if qscale <= 1e-10 * ref * ref * ref:
        return 1, 0, rs, ts
    quartic = np.empty(5)
    quartic[0] = p2 * p2 + q1 * q1
    quartic[1] = 2.0 * p1 * p2 + 2.0 * q0 * q1
    quartic[2] = p1 * p1 + 2.0 * p0 * p2 + q0 * q0 - q1 * q1
    quartic[3] = 2.0 * p0 * p1 - 2.0 * q0 * q1
    quartic[4] = p0 * p0 - q0 * q0
    roots, nroots = poly_real_roots(quartic)
    count = 0
    for ri in range(max(nroots, 0)):
        s = roots[ri]
        if abs(s) > 1.0 + 1e-9:
            continue
        if s > 1.0:
            s = 1.0
        elif s < -1.0:
            s = -1.0
        cbase = np.sqrt(max(0.0, 1.0 - s * s))
        for sgn in range(2):
            if count >= 4:
                break
            cth = cbase if sgn == 0 else -cbase
            if sgn == 1 and cbase < 1e-12:
                continue
            # back-substitute (t1, t2) by least squares over the 3 constraints
            g00 = 0.0
            g01 = 0.0
            g11 = 0.0
            y0 = 0.0
            y1 = 0.0
            rscale = 0.0
            for i in range(3):
                ai = a0[i] + ac[i] * cth + as_[i] * s
                bi = b0[i] + bc[i] * cth + bs[i] * s
                ci_v = c0[i] + cc[i] * cth + cs[i] * s
                g00 += ai * ai
                g01 += ai * bi
                g11 += bi * bi
                y0 -= ai * ci_v
                y1 -= bi * ci_v
                for val in (ai, bi, ci_v):
                    if abs(val) > rscale:
                        rscale = abs(val)
            det = g00 * g11 - g01 * g01
            if det <= 1e-14 * max(g00 * g11, 1e-300):
                continue
            tx = (g11 * y0 - g01 * y1) / det
            ty = (g00 * y1 - g01 * y0) / det
            resid = 0.0
            for i in range(3):
                ai = a0[i] + ac[i] * cth + as_[i] * s
                bi = b0[i] + bc[i] * cth + bs[i] * s
                ci_v = c0[i] + cc[i] * cth + cs[i] * s
                rr = abs(ai * tx + bi * ty + ci_v)
                if rr > resid:
                    resid = rr
            tol = 1e-6 * max(rscale, 1e-12) * (1.0 + abs(tx) + abs(ty))
            if resid > tol:
                continue
            # assemble pose in original coordinates: pre2^-1 o Tc o pre1
            rz = np.empty((3, 3))
            rz[0, 0] = cth
            rz[0, 1] = -s
            rz[0, 2] = 0.0
            rz[1, 0] = s
            rz[1, 1] = cth
            rz[1, 2] = 0.0
            rz[2, 0] = 0.0
            rz[2, 1] = 0.0
            rz[2, 2] = 1.0
            r_out = r2.T @ (rz @ r1)
            tcan = rz @ t1
            tcan[0] += tx
            tcan[1] += ty
            t_out = r2.T @ (tcan - t2)
            dup = False
            for pcand in range(count):
                dmax = 0.0
                for j in range(3):
                    for k in range(3):
                        dmax = max(dmax, abs(rs[pcand, j, k] - r_out[j, k]))
                    dmax = max(dmax, abs(ts[pcand, j] - t_out[j]))
                if dmax < 1e-9:
                    dup = True
                    break
            if dup:
                continue
            for j in range(3):
                for k in range(3):
                    rs[count, j, k] = r_out[j, k]
                ts[count, j] = t_out[j]
            count += 1
        if count >= 4:
            break
    return 0, count, rs, ts


def warm_up():
    """Compile the kernels (cached across processes)."""
    seg = np.array([[0.0, 0.0, 0.0]])
    seg2 = np.array([[1.0, 0.0, 0.0]])
    cross_distances(seg, seg2, seg, seg2)
    a = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    fit_rigid(a, a)
    hist = np.zeros(4)
    ph = np.zeros((1, 12))
    ap_run(a, a + 0.5, a + 0.1, a + 0.6, 1e-6, 4, 1.0, hist, ph, False)
    poly_real_roots(np.array([1.0, 0.0, -1.0, 0.0, 0.0]))
    n = np.array([0.0, 0.0, 1.0])
    canon_plane_xy(n, 0.0)
    nx = np.array([1.0, 0.0, 0.0])
    canon_two_planes(nx, 0.0, n, 0.0)
    d = np.array([0.0, 1.0, 0.0])
    m = np.array([0.0, 0.0, 0.0])
    solve_1l2p(d, m, d, m, nx, 0.0, n, 0.0, nx, 0.0, n, 0.0)
    ld = np.stack((d, nx, np.array([0.0, 0.0, 1.0])))
    lm = np.zeros((3, 3))
    solve_3l1p(ld, lm, ld, lm, n, 0.0, n, 0.0)
    w = np.ones(1)
    count_weighted_inliers(np.eye(3), np.zeros(3), seg, seg2, seg, seg2, w, 0.1)
