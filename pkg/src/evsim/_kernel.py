"""Fused fixed-step simulation loop.

The scenario loop lives in one jitted function so long drive-cycle runs stay
fast; every formula mirrors the module-level operations (motor, inverter,
battery, vehicle, controllers) operation-for-operation, and a test pins the
two paths against each other.  With numba unavailable the plain-Python
fallback of the same function is used.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            fn.py_func = fn
            return fn

        if args and callable(args[0]):
            return wrap(args[0])
        return wrap


TWO_PI = 2.0 * math.pi
SIXTY_DEG = math.pi / 3.0
RAD_PER_S_TO_RPM = 60.0 / TWO_PI
OMEGA_EPS = 1e-3
SQRT2 = math.sqrt(2.0)

# Scenario / controller selectors shared with engine.py
SCEN_OPEN = 0
SCEN_CLOSED = 1
SCEN_DYNAMICS = 2
CTRL_OPENLOOP = 0
CTRL_PID = 1
CTRL_SMC = 2

# Six-step gate pattern per 60-degree sector (mirrors motor._COMMUTATION)
GATE_A = np.array([1, 1, 0, -1, -1, 0], dtype=np.float64)
GATE_B = np.array([-1, 0, 1, 1, 0, -1], dtype=np.float64)
GATE_C = np.array([0, -1, -1, 0, 1, 1], dtype=np.float64)

# Column layout of the output array (matches engine.SimLog / export order)
N_COLS = 13


@njit(cache=True)
def _trap(theta: float) -> float:
    th = theta % TWO_PI
    if th < 2.0 * math.pi / 3.0:
        return 1.0
    if th < math.pi:
        return 1.0 - 2.0 * (th - 2.0 * math.pi / 3.0) / SIXTY_DEG
    if th < 5.0 * math.pi / 3.0:
        return -1.0
    return -1.0 + 2.0 * (th - 5.0 * math.pi / 3.0) / SIXTY_DEG


@njit(cache=True)
def _cell_voltage(e0, kappa, q, a_exp, b_exp, it, ihat):
    """Discharge/charge branch on sign(ihat); mirrors battery.py formulas."""
    if ihat >= 0.0:
        pol = kappa * q / (q - it)
        return e0 - pol * ihat - pol * it + a_exp * math.exp(-b_exp * it)
    return (e0
            - kappa * q / (it + 0.1 * q) * ihat
            - kappa * q / (q - it) * it
            + a_exp * math.exp(-b_exp * it))


@njit(cache=True)
def _rhs(ia, ib, ic, om, th, il, vcap,
         ua, ub, uc, delta, vbatt, vdc, tl_base, dyn, grade,
         r_sp, l_eff, lam, p_half, j_use, b_fric,
         lz, cz, r_l, mass, mu, kdrag, r_over_g, grav):
    """Composite state derivative: motor (5) + Z-source LC (2)."""
    fa = _trap(th)
    fb = _trap(th - 2.0 * math.pi / 3.0)
    fc = _trap(th + 2.0 * math.pi / 3.0)
    k = om * lam
    ea = k * fa
    eb = k * fb
    ec = k * fc
    v_no = ((ua + ub + uc) - (ea + eb + ec)) / 3.0
    dia = (ua - v_no - r_sp * ia - ea) / l_eff
    dib = (ub - v_no - r_sp * ib - eb) / l_eff
    dic = (uc - v_no - r_sp * ic - ec) / l_eff
    if abs(om) > OMEGA_EPS:
        te = (ea * ia + eb * ib + ec * ic) / om
    else:
        te = lam * (fa * ia + fb * ib + fc * ic)
    if dyn:
        v = om * r_over_g
        sgn = 1.0 if v > 0.0 else (-1.0 if v < 0.0 else 0.0)
        f_g = mass * grav * math.sin(grade)
        f_r = mu * mass * grav * math.cos(grade) * sgn
        f_w = kdrag * v * v * sgn
        tl = (f_g + f_r + f_w) * r_over_g
    else:
        tl = tl_base
    dom = (te - tl - b_fric * om) / j_use
    dth = p_half * om
    dil = (delta * vcap + (1.0 - delta) * (vbatt - vcap) - r_l * il) / lz
    dvc = (1.0 - delta) * (il - (ua * ia + ub * ib + uc * ic) / vdc) / cz
    return dia, dib, dic, dom, dth, dil, dvc


@njit(cache=True)
def simulate_loop(n_steps, dt, scen_kind, ctrl_kind,
                  ref_t, ref_v, cyc_t, cyc_v, cyc_g,
                  mp, zp, bp, vp, cp, out):
    """Run one scenario, filling ``out`` (n_steps+1 rows).

    Returns -1 on success, else the index of the step whose state went
    non-finite.
    """
    # -- unpack parameter blocks --------------------------------------------
    r_sp, l_eff, lam, p_half, j_bare, b_fric, i_max = (mp[0], mp[1], mp[2],
                                                      mp[3], mp[4], mp[5], mp[6])
    lz, cz, r_l, delta_max, delta_nom, v_bus_target = zp[0], zp[1], zp[2], zp[3], zp[4], zp[5]
    e0, kappa, q_ah, a_exp, b_exp = bp[0], bp[1], bp[2], bp[3], bp[4]
    tau_f, r_int, n_series, regen_a, it0 = bp[5], bp[6], bp[7], bp[8], bp[9]
    mass, mu, kdrag, r_wheel, gear, m_eff, grav = (vp[0], vp[1], vp[2], vp[3],
                                                   vp[4], vp[5], vp[6])
    kp, ki, kd = cp[0], cp[1], cp[2]
    out_min, out_max, i_lim = cp[3], cp[4], cp[5]
    c_s, l_bound, alpha, phi, smc_lim = cp[6], cp[7], cp[8], cp[9], cp[10]
    rho_sigma_form = cp[11] != 0.0
    norm_rpm, rating_rpm, rate_tau_s, tl_base = cp[12], cp[13], cp[14], cp[15]

    dyn = scen_kind == SCEN_DYNAMICS
    r_over_g = r_wheel / gear
    kmph_to_rpm = gear / (3.6 * r_wheel) * RAD_PER_S_TO_RPM
    j_use = j_bare + m_eff * r_over_g * r_over_g if dyn else j_bare
    rho_const = l_bound + alpha / SQRT2
    have_grade = cyc_g.shape[0] > 0

    # -- initial states ------------------------------------------------------
    ia = 0.0
    ib = 0.0
    ic = 0.0
    om = 0.0
    th = 0.0
    it = it0
    ihat = 0.0
    v_term = n_series * _cell_voltage(e0, kappa, q_ah, a_exp, b_exp, it, 0.0)
    soc = 1.0 - it / q_ah
    il = 0.0
    vcap = v_term
    integ = 0.0
    prev_err = 0.0
    x1_prev = 0.0
    x2f = 0.0
    v_prev = 0.0

    for k in range(n_steps + 1):
        t = k * dt
        # reference and grade
        if dyn:
            ref_disp = np.interp(t, cyc_t, cyc_v)  # km/h
            ref_rpm = ref_disp * kmph_to_rpm
            grade = np.interp(t, cyc_t, cyc_g) if have_grade else 0.0
        else:
            idx = np.searchsorted(ref_t, t, side="right") - 1
            if idx < 0:
                idx = 0
            ref_rpm = ref_v[idx]
            ref_disp = ref_rpm
            grade = 0.0
        rpm = om * RAD_PER_S_TO_RPM

        # controller (mirrors controllers.py step operations)
        sig = 0.0
        if ctrl_kind == CTRL_OPENLOOP:
            u = ref_rpm / rating_rpm
            u = min(max(u, 0.0), 1.0)
        elif ctrl_kind == CTRL_PID:
            err = ref_rpm - rpm
            if k == 0:
                prev_err = err
            integ_c = min(max(integ + err * dt, -i_lim), i_lim)
            der = (err - prev_err) / dt
            u = kp * err + ki * integ_c + kd * der
            if u > out_max:
                u = out_max
                if err > 0.0:
                    integ_c = integ
            elif u < out_min:
                u = out_min
                if err < 0.0:
                    integ_c = integ
            integ = integ_c
            prev_err = err
        else:
            x1 = (rpm - ref_rpm) / norm_rpm
            if k == 0:
                x1_prev = x1
            raw = (x1 - x1_prev) / dt
            x2f = x2f + (raw - x2f) / (rate_tau_s / dt)
            x1_prev = x1
            sig = x2f + c_s * x1
            rho = (l_bound + abs(sig) / SQRT2) if rho_sigma_form else rho_const
            if phi == 0.0:
                if sig > 0.0:
                    sw = 1.0
                elif sig < 0.0:
                    sw = -1.0
                else:
                    sw = 0.0
            else:
                sw = min(max(sig / phi, -1.0), 1.0)
            u = -c_s * x2f - rho * sw
            u = min(max(u, -smc_lim), smc_lim)

        # back-EMF feedforward: the drive carries the motional voltage so the
        # closed-loop controllers only shape the torque-producing residual.
        # The open-loop scenario has no speed sensor, so no feedforward there.
        if ctrl_kind == CTRL_OPENLOOP:
            u_ff = 0.0
        else:
            u_ff = om * lam / (0.5 * v_term / (1.0 - 2.0 * delta_nom))

        # shoot-through duty schedule and DC link
        required = abs(u + u_ff) * v_bus_target
        if required > v_term > 0.0:
            delta_req = 0.5 * (1.0 - v_term / required)
        else:
            delta_req = 0.0
        delta = min(max(max(delta_req, delta_nom), 0.0), delta_max)
        vdc = v_term / (1.0 - 2.0 * delta)
        if ctrl_kind != CTRL_OPENLOOP:
            u_ff = om * lam / (0.5 * vdc)
        u_total = min(max(u + u_ff, -1.0), 1.0)
        # drive current protection: keep the commanded envelope inside a
        # window around the motional voltage so phase currents stay <= i_max
        emf_norm = om * lam / (0.5 * vdc)
        du_lim = i_max * r_sp / (0.5 * vdc)
        u_total = min(max(u_total, emf_norm - du_lim), emf_norm + du_lim)

        # log-time quantities
        fa = _trap(th)
        fb = _trap(th - 2.0 * math.pi / 3.0)
        fc = _trap(th + 2.0 * math.pi / 3.0)
        ea = om * lam * fa
        eb = om * lam * fb
        ec = om * lam * fc
        if abs(om) > OMEGA_EPS:
            te_log = (ea * ia + eb * ib + ec * ic) / om
        else:
            te_log = lam * (fa * ia + fb * ib + fc * ic)
        if dyn:
            v_now = om * r_over_g
            if v_now < 0.0:
                v_now = 0.0
            sgn = 1.0 if v_now > 0.0 else 0.0
            f_g = mass * grav * math.sin(grade)
            f_r = mu * mass * grav * math.cos(grade) * sgn
            f_w = kdrag * v_now * v_now * sgn
            tl_log = (f_g + f_r + f_w) * r_over_g
            a_now = (v_now - v_prev) / dt if k > 0 else 0.0
            f_tr = (f_g + f_r + f_w) + m_eff * a_now
            p_tr = f_tr * v_now
        else:
            v_now = 0.0
            tl_log = tl_base
            p_tr = 0.0

        out[k, 0] = t
        out[k, 1] = ref_disp
        out[k, 2] = rpm
        out[k, 3] = v_now * 3.6
        out[k, 4] = te_log
        out[k, 5] = tl_log
        out[k, 6] = th
        out[k, 7] = soc
        out[k, 8] = v_term
        out[k, 9] = vdc
        out[k, 10] = u
        out[k, 11] = sig
        out[k, 12] = p_tr
        v_prev = v_now

        probe = ia + ib + ic + om + th + il + vcap + v_term + u
        if not np.isfinite(probe):
            return k
        if k == n_steps:
            break

        # held phase voltages: trapezoid-shaped modulation aligned with the
        # back-EMF (full drive on the two flat-top phases of each sector)
        half_bus = 0.5 * vdc
        ua = _trap(th) * u_total * half_bus
        ub = _trap(th - 2.0 * math.pi / 3.0) * u_total * half_bus
        uc = _trap(th + 2.0 * math.pi / 3.0) * u_total * half_bus

        # classical RK4 on the composite state, inputs held
        k1 = _rhs(ia, ib, ic, om, th, il, vcap, ua, ub, uc, delta, v_term, vdc,
                  tl_base, dyn, grade, r_sp, l_eff, lam, p_half, j_use, b_fric,
                  lz, cz, r_l, mass, mu, kdrag, r_over_g, grav)
        h2 = 0.5 * dt
        k2 = _rhs(ia + h2 * k1[0], ib + h2 * k1[1], ic + h2 * k1[2],
                  om + h2 * k1[3], th + h2 * k1[4], il + h2 * k1[5],
                  vcap + h2 * k1[6], ua, ub, uc, delta, v_term, vdc,
                  tl_base, dyn, grade, r_sp, l_eff, lam, p_half, j_use, b_fric,
                  lz, cz, r_l, mass, mu, kdrag, r_over_g, grav)
        k3 = _rhs(ia + h2 * k2[0], ib + h2 * k2[1], ic + h2 * k2[2],
                  om + h2 * k2[3], th + h2 * k2[4], il + h2 * k2[5],
                  vcap + h2 * k2[6], ua, ub, uc, delta, v_term, vdc,
                  tl_base, dyn, grade, r_sp, l_eff, lam, p_half, j_use, b_fric,
                  lz, cz, r_l, mass, mu, kdrag, r_over_g, grav)
        k4 = _rhs(ia + dt * k3[0], ib + dt * k3[1], ic + dt * k3[2],
                  om + dt * k3[3], th + dt * k3[4], il + dt * k3[5],
                  vcap + dt * k3[6], ua, ub, uc, delta, v_term, vdc,
                  tl_base, dyn, grade, r_sp, l_eff, lam, p_half, j_use, b_fric,
                  lz, cz, r_l, mass, mu, kdrag, r_over_g, grav)
        w = dt / 6.0
        ia += w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        ib += w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        ic += w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        om += w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        th += w * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
        il += w * (k1[5] + 2.0 * k2[5] + 2.0 * k3[5] + k4[5])
        vcap += w * (k1[6] + 2.0 * k2[6] + 2.0 * k3[6] + k4[6])
        th = th % TWO_PI

        # battery: averaged electrical power through a lossless converter
        p_elec = ua * ia + ub * ib + uc * ic
        i_bat = p_elec / v_term
        if i_bat < -regen_a:
            i_bat = -regen_a
        it = it + i_bat * dt / 3600.0
        it = min(max(it, 0.0), q_ah - 1e-6)
        ihat = ihat + (dt / tau_f) * (i_bat - ihat)
        v_cell = _cell_voltage(e0, kappa, q_ah, a_exp, b_exp, it, ihat)
        v_cell -= i_bat * r_int
        v_term = n_series * v_cell
        soc = 1.0 - it / q_ah

    return -1
