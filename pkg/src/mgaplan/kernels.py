"""Compiled numerical core.

Every hot loop of the model lives here as a nopython numba function working
on plain floats and small float64 arrays.  The public modules (`conic`,
`ephem`, `legs`) are thin adapters over these kernels, so the numbers seen
through the friendly API are bit-identical to the ones used inside the
planner's inner loops.

Conventions inside this module only: time is in seconds (epochs are seconds
since MJD2000), angles in radians, lengths in km.  Status codes returned by
orbit routines: 0 = elliptic prograde, 1 = retrograde, 2 = non-elliptic.

Leg-evaluation kernels return ``ok = 0`` for a cleanly built leg and a
positive code otherwise; the Python layer maps those to exceptions where the
API demands them, or to NaN samples inside the phasing solver.
"""

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi
DAY_S = 86400.0

KEPLER_TOL = 1e-13
KEPLER_MAX_NEWTON = 50

# leg_eval failure codes
OK = 0
ERR_RETROGRADE = 1
ERR_NON_ELLIPTIC = 2
ERR_NO_INTERSECTION = 3
ERR_DEGENERATE = 4
ERR_BAD_SWINGBY = 5

# mode codes for phasing legs
MODE_LAUNCH = 0
MODE_SWINGBY = 1


@njit(cache=True)
def wrap_two_pi(x):
    """Reduce an angle to [0, 2*pi)."""
    y = x - TWO_PI * np.floor(x / TWO_PI)
    if y >= TWO_PI:
        y -= TWO_PI
    if y < 0.0:
        y += TWO_PI
    return y


@njit(cache=True)
def wrap_pi(x):
    """Reduce an angle to (-pi, pi]."""
    y = wrap_two_pi(x)
    if y > np.pi:
        y -= TWO_PI
    return y


@njit(cache=True)
def kepler_E(M, e):
    """Eccentric anomaly from mean anomaly, elliptic case.

    Newton iteration started at M + e*sin(M); if it fails to settle within
    50 steps the bracketing bisection below takes over.  Residual tolerance
    is 1e-13 on |E - e*sin(E) - M|.
    """
    Mr = wrap_two_pi(M)
    E = Mr + e * np.sin(Mr)
    for _ in range(KEPLER_MAX_NEWTON):
        f = E - e * np.sin(E) - Mr
        if abs(f) < KEPLER_TOL:
            return E
        E = E - f / (1.0 - e * np.cos(E))
    # Newton did not converge (possible for e close to 1 near M = 0):
    # fall back to plain bisection on [Mr - e, Mr + e].
    lo = Mr - e
    hi = Mr + e
    flo = lo - e * np.sin(lo) - Mr
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = mid - e * np.sin(mid) - Mr
        if abs(fm) < KEPLER_TOL or (hi - lo) < 1e-15:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo = mid
            flo = fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def ecc_to_true(E, e):
    return 2.0 * np.arctan2(np.sqrt(1.0 + e) * np.sin(0.5 * E),
                            np.sqrt(1.0 - e) * np.cos(0.5 * E))


@njit(cache=True)
def true_to_ecc(theta, e):
    return 2.0 * np.arctan2(np.sqrt(1.0 - e) * np.sin(0.5 * theta),
                            np.sqrt(1.0 + e) * np.cos(0.5 * theta))


@njit(cache=True)
def mean_from_true(theta, e):
    E = true_to_ecc(theta, e)
    return E - e * np.sin(E)


@njit(cache=True)
def state_at_anomaly(a, e, w, mu, theta):
    """Cartesian state on a conic at true anomaly theta.

    Valid for any e with positive semi-latus rectum (a < 0 for hyperbolae).
    """
    p = a * (1.0 - e * e)
    r = p / (1.0 + e * np.cos(theta))
    u = w + theta
    cu = np.cos(u)
    su = np.sin(u)
    h = np.sqrt(mu * p)
    vr = mu / h * e * np.sin(theta)
    vt = h / r
    return r * cu, r * su, vr * cu - vt * su, vr * su + vt * cu


@njit(cache=True)
def orbit_from_state(x, y, vx, vy, mu):
    """Orbital elements (a, e, lon_peri, true anomaly, status) from a state.

    status: 0 elliptic prograde, 1 retrograde (h <= 0), 2 non-elliptic
    (e >= 1; a is returned negative or huge in that case).
    """
    r = np.sqrt(x * x + y * y)
    v2 = vx * vx + vy * vy
    h = x * vy - y * vx
    if h <= 0.0:
        return 0.0, 0.0, 0.0, 0.0, ERR_RETROGRADE
    rv = x * vx + y * vy
    ex = ((v2 - mu / r) * x - rv * vx) / mu
    ey = ((v2 - mu / r) * y - rv * vy) / mu
    e = np.sqrt(ex * ex + ey * ey)
    energy = 0.5 * v2 - mu / r
    if energy == 0.0:
        a = np.inf
    else:
        a = -mu / (2.0 * energy)
    if e > 0.0:
        w = np.arctan2(ey, ex)
    else:
        w = 0.0
    theta = wrap_two_pi(np.arctan2(y, x) - w)
    status = OK if e < 1.0 else ERR_NON_ELLIPTIC
    return a, e, wrap_two_pi(w), theta, status


@njit(cache=True)
def tof_ell(a, e, mu, theta_from, theta_to, n_rev):
    """Seconds of flight from theta_from forward to theta_to, plus n_rev laps."""
    M1 = mean_from_true(theta_from, e)
    M2 = mean_from_true(theta_to, e)
    dM = wrap_two_pi(M2 - M1)
    n = np.sqrt(mu / (a * a * a))
    return (dM + n_rev * TWO_PI) / n


@njit(cache=True)
def body_state_at(a, e, w, M0, tref_s, mu, t_s):
    """Cartesian state of a body on fixed mean elements at epoch t_s."""
    n = np.sqrt(mu / (a * a * a))
    M = M0 + n * (t_s - tref_s)
    E = kepler_E(M, e)
    theta = ecc_to_true(E, e)
    return state_at_anomaly(a, e, w, mu, theta)


@njit(cache=True)
def body_anomaly_at(a, e, M0, tref_s, mu, t_s):
    """True anomaly of a body on fixed mean elements at epoch t_s."""
    n = np.sqrt(mu / (a * a * a))
    M = M0 + n * (t_s - tref_s)
    E = kepler_E(M, e)
    return wrap_two_pi(ecc_to_true(E, e))


@njit(cache=True)
def intersect_conics(a1, e1, w1, a2, e2, w2):
    """Absolute longitudes where two coplanar conics share a point.

    Radius equality at a common longitude reduces to
    A*cos(t) + B*sin(t) = C.  Returns (n, t_a, t_b, degenerate) with n in
    {0, 1, 2}; degenerate = 1 flags coincident conics (normalised A, B, C
    all below 1e-9) where the intersection set is a whole curve.
    """
    p1 = a1 * (1.0 - e1 * e1)
    p2 = a2 * (1.0 - e2 * e2)
    A = p2 * e1 * np.cos(w1) - p1 * e2 * np.cos(w2)
    B = p2 * e1 * np.sin(w1) - p1 * e2 * np.sin(w2)
    C = p1 - p2
    scale = max(abs(p1), abs(p2))
    if abs(A) / scale < 1e-9 and abs(B) / scale < 1e-9 and abs(C) / scale < 1e-9:
        return 0, 0.0, 0.0, 1
    R = np.sqrt(A * A + B * B)
    if R == 0.0:
        return 0, 0.0, 0.0, 0
    u = C / R
    if abs(u) > 1.0 + 1e-9:
        return 0, 0.0, 0.0, 0
    phi = np.arctan2(B, A)
    if abs(u) >= 1.0:
        # tangency within tolerance: a single grazing contact
        d = 0.0 if u >= 1.0 else np.pi
        return 1, wrap_two_pi(phi + d), 0.0, 0
    d = np.arccos(u)
    t_a = wrap_two_pi(phi + d)
    t_b = wrap_two_pi(phi - d)
    if abs(wrap_pi(t_a - t_b)) < 1e-12:
        return 1, t_a, 0.0, 0
    return 2, t_a, t_b, 0


@njit(cache=True)
def swingby_turn(v_inf, mu_p, rp):
    """Deflection magnitude 2*theta_inf - pi of an unpowered flyby."""
    s = mu_p / rp
    theta_inf = np.arccos(-s / (v_inf * v_inf + s))
    return 2.0 * theta_inf - np.pi


@njit(cache=True)
def first_arc_k(a1, e1, w1, th0, t0_s, m_dsm, n_rev1, f_pa, dth_forced, mu_c):
    """Propagate to the manoeuvre point M and apply the tangential DSM.

    Returns (a2, e2, w2, thM, tM_s, status) describing the post-DSM orbit
    and the anomaly/epoch of M on it.  With m_dsm = 0 the orbit is left
    untouched and M is just dth_forced ahead of the start anomaly.
    """
    if m_dsm != 0.0:
        th_dsm = np.pi if f_pa != 0.0 else 0.0
        dt1 = tof_ell(a1, e1, mu_c, th0, th_dsm, n_rev1)
        xM, yM, vxM, vyM = state_at_anomaly(a1, e1, w1, mu_c, th_dsm)
        vM = np.sqrt(vxM * vxM + vyM * vyM)
        vxM += m_dsm * vxM / vM
        vyM += m_dsm * vyM / vM
        a2, e2, w2, thM, st = orbit_from_state(xM, yM, vxM, vyM, mu_c)
        if st != OK:
            return 0.0, 0.0, 0.0, 0.0, 0.0, st
    else:
        thM = wrap_two_pi(th0 + dth_forced)
        dt1 = tof_ell(a1, e1, mu_c, th0, thM, 0.0)
        a2, e2, w2 = a1, e1, w1
    return a2, e2, w2, thM, t0_s + dt1, OK


@njit(cache=True)
def select_intersection(a2, e2, w2, thM, tgt_a, tgt_e, tgt_w, f_12):
    """Pick the crossing of the spacecraft orbit with the target conic.

    f_12 = 0 takes the intersection with the smaller forward angular
    distance from thM along the spacecraft orbit, f_12 = 1 the other one.
    Returns (absolute longitude, status).
    """
    n_int, ta, tb, degen = intersect_conics(a2, e2, w2, tgt_a, tgt_e, tgt_w)
    if degen != 0:
        return 0.0, ERR_DEGENERATE
    if n_int == 0:
        return 0.0, ERR_NO_INTERSECTION
    if n_int == 2:
        d_a = wrap_two_pi(wrap_two_pi(ta - w2) - thM)
        d_b = wrap_two_pi(wrap_two_pi(tb - w2) - thM)
        if d_a <= d_b:
            near_abs, far_abs = ta, tb
        else:
            near_abs, far_abs = tb, ta
        return (far_abs if f_12 != 0.0 else near_abs), OK
    return ta, OK


@njit(cache=True)
def leg_eval(lam, mode, start, aux, legp, tgt, mu_c):
    """Build one leg for trial parameter ``lam`` and measure the phasing gap.

    start: (xP, yP, vxP, vyP, t_s) planet state and epoch at leg start.
    aux:   launch -> (phi0, _, _, _); swingby -> (v_in_x, v_in_y, mu_p, _).
    legp:  (m_dsm, n_rev1, n_rev2, f_pa, f_12, dtheta_forced).
    tgt:   (a, e, lon_peri, M0, tref_s) of the target body.

    Returns (dtheta, t_int_s, x, y, vx, vy, ok).  dtheta is the target's
    true anomaly minus the intersection anomaly, wrapped to (-pi, pi].
    """
    xP = start[0]
    yP = start[1]
    t0_s = start[4]

    if mode == MODE_LAUNCH:
        vPx = start[2]
        vPy = start[3]
        vP = np.sqrt(vPx * vPx + vPy * vPy)
        if vP == 0.0:
            return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ERR_BAD_SWINGBY
        phi0 = aux[0]
        c = np.cos(phi0)
        s = np.sin(phi0)
        ux = vPx / vP
        uy = vPy / vP
        vx0 = vPx + lam * (c * ux - s * uy)
        vy0 = vPy + lam * (s * ux + c * uy)
    else:
        vPx = start[2]
        vPy = start[3]
        vix = aux[0] - vPx
        viy = aux[1] - vPy
        v_inf = np.sqrt(vix * vix + viy * viy)
        if v_inf == 0.0:
            return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, ERR_BAD_SWINGBY
        mu_p = aux[2]
        rp = abs(lam)
        delta = swingby_turn(v_inf, mu_p, rp)
        if lam < 0.0:
            delta = -delta
        c = np.cos(delta)
        s = np.sin(delta)
        vx0 = vPx + c * vix - s * viy
        vy0 = vPy + s * vix + c * viy

    a1, e1, w1, th0, st = orbit_from_state(xP, yP, vx0, vy0, mu_c)
    if st != OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, st

    a2, e2, w2, thM, tM_s, st = first_arc_k(a1, e1, w1, th0, t0_s,
                                            legp[0], legp[1], legp[3],
                                            legp[5], mu_c)
    if st != OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, st

    chosen_abs, st = select_intersection(a2, e2, w2, thM,
                                         tgt[0], tgt[1], tgt[2], legp[4])
    if st != OK:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, st

    th_sc = wrap_two_pi(chosen_abs - w2)
    n_rev2 = legp[2]
    dt2 = tof_ell(a2, e2, mu_c, thM, th_sc, n_rev2)
    t_int_s = tM_s + dt2

    th_body = body_anomaly_at(tgt[0], tgt[1], tgt[3], tgt[4], mu_c, t_int_s)
    th_bar = wrap_two_pi(chosen_abs - tgt[2])
    dtheta = wrap_pi(th_body - th_bar)

    x, y, vx, vy = state_at_anomaly(a2, e2, w2, mu_c, th_sc)
    return dtheta, t_int_s, x, y, vx, vy, OK


@njit(cache=True)
def _dtheta_only(lam, mode, start, aux, legp, tgt, mu_c):
    d, _, _, _, _, _, ok = leg_eval(lam, mode, start, aux, legp, tgt, mu_c)
    if ok != OK:
        return np.nan
    return d


@njit(cache=True)
def _brent_dtheta(xa, xb, fa, fb, mode, start, aux, legp, tgt, mu_c):
    """Brent root refinement of the phasing gap on a sign-change bracket."""
    a = xa
    b = xb
    c = a
    fc = fa
    d = b - a
    e = d
    for _ in range(120):
        if fb != 0.0 and ((fc > 0.0) == (fb > 0.0)):
            c = a
            fc = fa
            d = b - a
            e = d
        if abs(fc) < abs(fb):
            a = b
            b = c
            c = a
            fa = fb
            fb = fc
            fc = fa
        tol = 2.0 * 2.220446049250313e-16 * abs(b) + 1e-15
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = m
            e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = m
                e = m
        a = b
        fa = fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if m > 0.0 else -tol
        fb = _dtheta_only(b, mode, start, aux, legp, tgt, mu_c)
        if np.isnan(fb):
            return np.nan
    return b


@njit(cache=True)
def solve_band(mode, start, aux, legp, tgt, mu_c, lo, hi, n_grid):
    """All phasing roots in one contiguous parameter band.

    Samples the gap on a uniform grid, refines every genuine sign change
    (finite neighbours, no wrap jump >= pi) with Brent, deduplicates at
    1e-6 relative spacing and returns a (k, 6) array of rows
    (lambda, t_int_s, x, y, vx, vy) sorted by lambda.
    """
    fs = np.empty(n_grid)
    xs = np.empty(n_grid)
    step = (hi - lo) / (n_grid - 1)
    for i in range(n_grid):
        xs[i] = lo + step * i
        fs[i] = _dtheta_only(xs[i], mode, start, aux, legp, tgt, mu_c)

    cand = np.empty(n_grid)
    k = 0
    for i in range(n_grid):
        if fs[i] == 0.0:
            cand[k] = xs[i]
            k += 1
    for i in range(n_grid - 1):
        f1 = fs[i]
        f2 = fs[i + 1]
        if np.isnan(f1) or np.isnan(f2):
            continue
        if f1 == 0.0 or f2 == 0.0:
            continue
        if (f1 > 0.0) != (f2 > 0.0) and abs(f1 - f2) < np.pi:
            r = _brent_dtheta(xs[i], xs[i + 1], f1, f2,
                              mode, start, aux, legp, tgt, mu_c)
            if not np.isnan(r):
                cand[k] = r
                k += 1

    out = np.empty((k, 6))
    if k == 0:
        return out
    sel = np.sort(cand[:k])
    m = 0
    for i in range(k):
        lam = sel[i]
        if m > 0:
            prev = out[m - 1, 0]
            if abs(lam - prev) <= 1e-6 * max(1e-6, abs(lam), abs(prev)):
                continue
        d, t_int, x, y, vx, vy, ok = leg_eval(lam, mode, start, aux,
                                              legp, tgt, mu_c)
        if ok != OK or abs(d) > 1e-9:
            continue
        out[m, 0] = lam
        out[m, 1] = t_int
        out[m, 2] = x
        out[m, 3] = y
        out[m, 4] = vx
        out[m, 5] = vy
        m += 1
    return out[:m]
