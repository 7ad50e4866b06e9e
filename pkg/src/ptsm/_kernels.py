"""Jitted fixed-step loops for the shipped plant/controller presets.

These mirror the reference implementations in ``controllers`` and
``plants`` (the agreement is asserted by the test suite) and exist only
for speed: a 150k-step closed-loop run finishes in well under a second.
Custom plants, controllers, and references go through the plain-Python
path in ``sim`` instead.

Log layout shared by both closed-loop kernels, one row per logged step:
``[t, q(n), qd(n), e(n), ed(n), s(n), tau(n), d(n), V]``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# controller variants inside manip_loop
KIND_PTSM = 0
KIND_TBG = 1
KIND_FIXED = 2

SNAP_EPS = 1e-9     # sliding flows snap to 0 below this magnitude
POW_CLAMP = 1e-6    # lower clamp on the base of the (gamma-1) power
NORM_GUARD = 1e-9   # below this ||s||, s/||s||^rho terms are set to 0


@njit(cache=True, nogil=True)
def _sig_pow_s(x, k):
    if x > 0.0:
        return x ** k
    elif x < 0.0:
        return -((-x) ** k)
    return 0.0


@njit(cache=True, nogil=True)
def _sat_s(x, width):
    # width <= 0 selects the exact sign
    if width <= 0.0:
        if x > 0.0:
            return 1.0
        elif x < 0.0:
            return -1.0
        return 0.0
    v = x / width
    if v > 1.0:
        return 1.0
    if v < -1.0:
        return -1.0
    return v


@njit(cache=True, nogil=True)
def _tbg_gain_s(t, Tc, eps_reg):
    if t >= Tc:
        return 0.0
    tau = t / Tc
    eps = ((10.0 * tau - 24.0) * tau + 15.0) * tau ** 4
    deps = 60.0 / Tc * tau ** 3 * (tau - 1.0) ** 2
    return deps / (1.0 - eps + eps_reg)


# ---------------------------------------------------------------------------
# on-surface (sliding phase) scalar flows
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def flow_ptsm(x0, Ts, gamma, dt, n_steps, dec):
    """Sliding flow of the predefined-time surface, from x0, logged every dec steps.

    Stepped in u = x/sqrt(1+x^2) where the flow is udot = -c*sig(u)^gamma
    with c = 1/(Ts*(1-gamma)); |udot| <= c, so the step size never fights
    the cubic growth of the raw xdot.
    """
    c = 1.0 / (Ts * (1.0 - gamma))
    u = x0 / np.sqrt(1.0 + x0 * x0)
    out = np.empty(n_steps // dec + 1)
    li = 0
    for step in range(n_steps + 1):
        if step % dec == 0:
            out[li] = u / np.sqrt((1.0 - u) * (1.0 + u))
            li += 1
        if step == n_steps:
            break
        k1 = -c * _sig_pow_s(u, gamma)
        k2 = -c * _sig_pow_s(u + 0.5 * dt * k1, gamma)
        k3 = -c * _sig_pow_s(u + 0.5 * dt * k2, gamma)
        k4 = -c * _sig_pow_s(u + dt * k3, gamma)
        un = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # finite-time arrival: the exact flow never crosses 0, so a sign
        # flip (or anything below SNAP_EPS) is the arrival event
        if abs(un) < SNAP_EPS or un * u < 0.0:
            un = 0.0
        u = un
    return out[:li]


@njit(cache=True, nogil=True)
def flow_power(x0, a1, b1, nu, dt, n_steps, dec):
    """Sliding flow xdot = -a1*x - b1*sig(x)^nu (a1 = 0 for the basic family)."""
    x = x0
    out = np.empty(n_steps // dec + 1)
    li = 0
    for step in range(n_steps + 1):
        if step % dec == 0:
            out[li] = x
            li += 1
        if step == n_steps:
            break
        k1 = -a1 * x - b1 * _sig_pow_s(x, nu)
        y = x + 0.5 * dt * k1
        k2 = -a1 * y - b1 * _sig_pow_s(y, nu)
        y = x + 0.5 * dt * k2
        k3 = -a1 * y - b1 * _sig_pow_s(y, nu)
        y = x + dt * k3
        k4 = -a1 * y - b1 * _sig_pow_s(y, nu)
        xn = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if abs(xn) < SNAP_EPS or xn * x < 0.0:
            xn = 0.0
        x = xn
    return out[:li]


@njit(cache=True, nogil=True)
def flow_fixed(x0, a2, b2, r1, r2, dt, n_steps, dec):
    """Sliding flow xdot = -a2*sig(x)^r1 - b2*sig(x)^r2 of the fixed-time family."""
    x = x0
    out = np.empty(n_steps // dec + 1)
    li = 0
    for step in range(n_steps + 1):
        if step % dec == 0:
            out[li] = x
            li += 1
        if step == n_steps:
            break
        k1 = -a2 * _sig_pow_s(x, r1) - b2 * _sig_pow_s(x, r2)
        y = x + 0.5 * dt * k1
        k2 = -a2 * _sig_pow_s(y, r1) - b2 * _sig_pow_s(y, r2)
        y = x + 0.5 * dt * k2
        k3 = -a2 * _sig_pow_s(y, r1) - b2 * _sig_pow_s(y, r2)
        y = x + dt * k3
        k4 = -a2 * _sig_pow_s(y, r1) - b2 * _sig_pow_s(y, r2)
        xn = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(xn):
            for j in range(li, out.size):
                out[j] = np.nan
            li = out.size
            break
        if abs(xn) < SNAP_EPS or xn * x < 0.0:
            xn = 0.0
        x = xn
    return out[:li]


# ---------------------------------------------------------------------------
# closed loop: uncertain second-order system under the predefined-time law
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def so_loop(xi0, eta0, dist, dt, n_steps, dec, Ts, gamma, Tc, rho, kf, width):
    """Sample-and-hold closed loop of the double-integrator stabilizer.

    Torque and disturbance are evaluated once per step and held; the plant
    is advanced one classical Runge-Kutta step per control period.
    Returns (log, diverged_at) with diverged_at < 0 when the run is clean.
    """
    n = xi0.size
    n_logs = n_steps // dec + 1
    L = np.empty((n_logs, 2 + 7 * n))
    xi = xi0.copy()
    eta = eta0.copy()
    s = np.empty(n)
    tau = np.empty(n)
    c = 1.0 / (Ts * (1.0 - gamma))
    li = 0
    diverged = -1.0
    for step in range(n_steps + 1):
        t = step * dt
        # surface and the drift-cancelling torque, componentwise
        for i in range(n):
            w = np.sqrt(1.0 + xi[i] * xi[i])
            u = xi[i] / w
            sg = _sig_pow_s(u, gamma)
            s[i] = eta[i] + w * w * w * c * sg
            base = abs(u)
            if base < POW_CLAMP:
                base = POW_CLAMP
            tau[i] = -(3.0 * xi[i] * w * eta[i] * c) * sg \
                - gamma * eta[i] * c * base ** (gamma - 1.0)
        # hitting law
        ss = 0.0
        for i in range(n):
            ss += s[i] * s[i]
        sn = np.sqrt(ss)
        for i in range(n):
            tau[i] -= kf[i] * _sat_s(s[i], width)
        if sn >= NORM_GUARD:
            coef = (np.pi / (rho * Tc)) * (1.0 + sn ** (2.0 * rho)) / sn ** rho
            for i in range(n):
                tau[i] -= coef * s[i]
        if step % dec == 0:
            L[li, 0] = t
            for i in range(n):
                L[li, 1 + i] = xi[i]
                L[li, 1 + n + i] = eta[i]
                L[li, 1 + 2 * n + i] = xi[i]
                L[li, 1 + 3 * n + i] = eta[i]
                L[li, 1 + 4 * n + i] = s[i]
                L[li, 1 + 5 * n + i] = tau[i]
                L[li, 1 + 6 * n + i] = dist[step, i]
            L[li, 1 + 7 * n] = 0.5 * ss
            li += 1
        if step == n_steps:
            break
        ok = True
        for i in range(n):
            u = tau[i] + dist[step, i]
            # RK4 stages for xidot = eta, etadot = u (u held within the step)
            k1x = eta[i]
            k2x = eta[i] + 0.5 * dt * u
            k3x = k2x
            k4x = eta[i] + dt * u
            xi[i] += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            eta[i] += u * dt
            if not (np.isfinite(xi[i]) and np.isfinite(eta[i])):
                ok = False
        if not ok:
            diverged = t + dt
            break
    return L[:li], diverged


# ---------------------------------------------------------------------------
# closed loop: 2-DOF manipulator tracking the shipped reference
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def manip_loop(q0, qd0, dist, dt, n_steps, dec,
               p_true, p_nom, g_const,
               Ts, gamma, Tc, rho, sg1, sg2, sg3, shat, kd,
               width, kind, tbg_Tc, eps_reg, alpha, beta, em1, en1, em2, en2):
    """Sample-and-hold closed loop of the 2-DOF arm under one of three laws.

    ``kind`` selects the hitting law: KIND_PTSM, KIND_TBG, or KIND_FIXED.
    The controller sees only the nominal parameter vector ``p_nom``; the
    plant integrates with ``p_true``.
    """
    pt1, pt2, pt3, pt4, pt5 = p_true[0], p_true[1], p_true[2], p_true[3], p_true[4]
    pn1, pn2, pn3, pn4, pn5 = p_nom[0], p_nom[1], p_nom[2], p_nom[3], p_nom[4]
    n_logs = n_steps // dec + 1
    L = np.empty((n_logs, 16))
    q1, q2 = q0[0], q0[1]
    qd1, qd2 = qd0[0], qd0[1]
    c = 1.0 / (Ts * (1.0 - gamma))
    K = np.empty((4, 4))
    li = 0
    diverged = -1.0
    for step in range(n_steps + 1):
        t = step * dt
        sin_t = np.sin(t)
        cos_t = np.cos(t)
        qr1 = 7.0 + 5.0 * sin_t
        qr2 = -7.0 - 5.0 * cos_t
        wr1 = 5.0 * cos_t
        wr2 = 5.0 * sin_t
        e1 = q1 - qr1
        e2 = q2 - qr2
        ed1 = qd1 - wr1
        ed2 = qd2 - wr2
        # surface and drift-derivative bracket, componentwise
        w1 = np.sqrt(1.0 + e1 * e1)
        u1 = e1 / w1
        sga = _sig_pow_s(u1, gamma)
        s1 = ed1 + w1 * w1 * w1 * c * sga
        base = abs(u1)
        if base < POW_CLAMP:
            base = POW_CLAMP
        br1 = 3.0 * e1 * w1 * ed1 * c * sga + gamma * ed1 * c * base ** (gamma - 1.0)
        w2 = np.sqrt(1.0 + e2 * e2)
        u2 = e2 / w2
        sgb = _sig_pow_s(u2, gamma)
        s2 = ed2 + w2 * w2 * w2 * c * sgb
        base = abs(u2)
        if base < POW_CLAMP:
            base = POW_CLAMP
        br2 = 3.0 * e2 * w2 * ed2 * c * sgb + gamma * ed2 * c * base ** (gamma - 1.0)
        # nominal model terms
        cq2 = np.cos(q2)
        sq2 = np.sin(q2)
        M11 = pn1 + 2.0 * pn2 * cq2
        M12 = pn3 + pn2 * cq2
        M22 = pn3
        C11 = -pn2 * sq2 * qd2
        C12 = -pn2 * sq2 * (qd1 + qd2)
        C21 = pn2 * sq2 * qd1
        gv1 = g_const * (pn4 * np.cos(q1) + pn5 * np.cos(q1 + q2))
        gv2 = g_const * pn5 * np.cos(q1 + q2)
        tau1 = -(M11 * br1 + M12 * br2) + C11 * qd1 + C12 * qd2 + gv1
        tau2 = -(M12 * br1 + M22 * br2) + C21 * qd1 + gv2
        # hitting law
        qn = np.sqrt(q1 * q1 + q2 * q2)
        qdn2 = qd1 * qd1 + qd2 * qd2
        rob = sg1 + sg2 * qn + sg3 * qdn2
        tau1 += -(rob + kd[0]) * _sat_s(s1, width) - (C11 * s1 + C12 * s2)
        tau2 += -(rob + kd[1]) * _sat_s(s2, width) - C21 * s1
        if kind == KIND_PTSM:
            sn = np.sqrt(s1 * s1 + s2 * s2)
            if sn >= NORM_GUARD:
                coef = (np.pi / (rho * Tc)) * (
                    shat ** (1.0 - rho / 2.0) + shat ** (1.0 + rho / 2.0) * sn ** (2.0 * rho)
                ) / sn ** rho
                tau1 -= coef * s1
                tau2 -= coef * s2
        elif kind == KIND_TBG:
            ph = shat * _tbg_gain_s(t, tbg_Tc, eps_reg)
            tau1 -= ph * s1
            tau2 -= ph * s2
        else:
            ka = alpha * shat ** ((em1 + en1) / (2.0 * en1))
            kb = beta * shat ** ((em2 + en2) / (2.0 * en2))
            tau1 -= ka * _sig_pow_s(s1, em1 / en1) + kb * _sig_pow_s(s1, em2 / en2)
            tau2 -= ka * _sig_pow_s(s2, em1 / en1) + kb * _sig_pow_s(s2, em2 / en2)
        if step % dec == 0:
            V = 0.5 * (s1 * (M11 * s1 + M12 * s2) + s2 * (M12 * s1 + M22 * s2))
            L[li, 0] = t
            L[li, 1] = q1
            L[li, 2] = q2
            L[li, 3] = qd1
            L[li, 4] = qd2
            L[li, 5] = e1
            L[li, 6] = e2
            L[li, 7] = ed1
            L[li, 8] = ed2
            L[li, 9] = s1
            L[li, 10] = s2
            L[li, 11] = tau1
            L[li, 12] = tau2
            L[li, 13] = dist[step, 0]
            L[li, 14] = dist[step, 1]
            L[li, 15] = V
            li += 1
        if step == n_steps:
            break
        f1 = tau1 + dist[step, 0]
        f2 = tau2 + dist[step, 1]
        # RK4 on the true plant with held torque
        for sidx in range(4):
            if sidx == 0:
                y1, y2, y3, y4 = q1, q2, qd1, qd2
            elif sidx == 1:
                y1 = q1 + 0.5 * dt * K[0, 0]
                y2 = q2 + 0.5 * dt * K[0, 1]
                y3 = qd1 + 0.5 * dt * K[0, 2]
                y4 = qd2 + 0.5 * dt * K[0, 3]
            elif sidx == 2:
                y1 = q1 + 0.5 * dt * K[1, 0]
                y2 = q2 + 0.5 * dt * K[1, 1]
                y3 = qd1 + 0.5 * dt * K[1, 2]
                y4 = qd2 + 0.5 * dt * K[1, 3]
            else:
                y1 = q1 + dt * K[2, 0]
                y2 = q2 + dt * K[2, 1]
                y3 = qd1 + dt * K[2, 2]
                y4 = qd2 + dt * K[2, 3]
            cc2 = np.cos(y2)
            ss2 = np.sin(y2)
            tM11 = pt1 + 2.0 * pt2 * cc2
            tM12 = pt3 + pt2 * cc2
            tM22 = pt3
            r1 = f1 - (-pt2 * ss2 * y4 * y3 - pt2 * ss2 * (y3 + y4) * y4) \
                - g_const * (pt4 * np.cos(y1) + pt5 * np.cos(y1 + y2))
            r2 = f2 - (pt2 * ss2 * y3 * y3) - g_const * pt5 * np.cos(y1 + y2)
            det = tM11 * tM22 - tM12 * tM12
            K[sidx, 0] = y3
            K[sidx, 1] = y4
            K[sidx, 2] = (tM22 * r1 - tM12 * r2) / det
            K[sidx, 3] = (tM11 * r2 - tM12 * r1) / det
        q1 += dt / 6.0 * (K[0, 0] + 2.0 * K[1, 0] + 2.0 * K[2, 0] + K[3, 0])
        q2 += dt / 6.0 * (K[0, 1] + 2.0 * K[1, 1] + 2.0 * K[2, 1] + K[3, 1])
        qd1 += dt / 6.0 * (K[0, 2] + 2.0 * K[1, 2] + 2.0 * K[2, 2] + K[3, 2])
        qd2 += dt / 6.0 * (K[0, 3] + 2.0 * K[1, 3] + 2.0 * K[2, 3] + K[3, 3])
        if not (np.isfinite(q1) and np.isfinite(q2) and np.isfinite(qd1) and np.isfinite(qd2)):
            diverged = t + dt
            break
    return L[:li], diverged
