"""Numba flow fields d(xi)/dt for the system catalog.

Each flow takes (state, params) float64 arrays and returns d(state)/dt under
df/dt = {H, f}. Layouts match systems.py: real systems are (q, p); complex
systems interleave (x1,y1,...,u1,v1,...) with z=x+iy, pi=u+iv.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def flow_oscillator(s, par):
    # par = [N, omega]
    N = int(par[0])
    w2 = par[1] * par[1]
    out = np.empty(2 * N)
    for i in range(N):
        out[i] = s[N + i]
        out[N + i] = -w2 * s[i]
    return out


@njit(cache=True)
def flow_coulomb(s, par):
    # par = [N, gamma]
    N = int(par[0])
    gam = par[1]
    r2 = 0.0
    for i in range(N):
        r2 += s[i] * s[i]
    r3 = r2 * np.sqrt(r2)
    out = np.empty(2 * N)
    for i in range(N):
        out[i] = s[N + i]
        out[N + i] = -gam * s[i] / r3
    return out


@njit(cache=True)
def flow_sw_real(s, par):
    # par = [N, omega, g_1..g_N]; conformal is omega=0
    N = int(par[0])
    w2 = par[1] * par[1]
    out = np.empty(2 * N)
    for i in range(N):
        g2 = par[2 + i] * par[2 + i]
        out[i] = s[N + i]
        out[N + i] = g2 / s[i] ** 3 - w2 * s[i]
    return out


@njit(cache=True)
def flow_planar(s, par):
    # TTW/PW in (r, phi, p_r, p_phi); par = [which, k, omega_or_gamma, alpha, beta]
    which = par[0]  # 0 -> oscillator (TTW), 1 -> coulomb (PW)
    k, c, al, be = par[1], par[2], par[3], par[4]
    r, phi, pr, pphi = s[0], s[1], s[2], s[3]
    sk = np.sin(k * phi)
    ck = np.cos(k * phi)
    ipt = pphi * pphi / 2 + k * k * al * al / sk ** 2 + k * k * be * be / ck ** 2
    dipt = -2 * k ** 3 * al * al * ck / sk ** 3 + 2 * k ** 3 * be * be * sk / ck ** 3
    out = np.empty(4)
    out[0] = pr
    out[1] = pphi / r ** 2
    if which == 0.0:
        out[2] = 2 * ipt / r ** 3 - c * c * r
    else:
        out[2] = 2 * ipt / r ** 3 - c / r ** 2
    out[3] = -dipt / r ** 2
    return out


@njit(cache=True)
def flow_sw_complex(s, par):
    # par = [N, omega, B, g_1..g_N]
    N = int(par[0])
    w2 = par[1] * par[1]
    B = par[2]
    out = np.empty(4 * N)
    for a in range(N):
        x, y = s[2 * a], s[2 * a + 1]
        u, v = s[2 * N + 2 * a], s[2 * N + 2 * a + 1]
        g2 = par[3 + a] * par[3 + a]
        r2 = x * x + y * y
        f = w2 - g2 / (r2 * r2)
        out[2 * a] = u
        out[2 * a + 1] = -v
        out[2 * N + 2 * a] = -x * f + B * v
        out[2 * N + 2 * a + 1] = y * f - B * u
    return out


@njit(cache=True)
def flow_cpn_ros(s, par):
    # par = [N, B, r0, om_0..om_N]
    N = int(par[0])
    B = par[1]
    r0 = par[2]
    z = np.empty(N, np.complex128)
    pi = np.empty(N, np.complex128)
    for a in range(N):
        z[a] = s[2 * a] + 1j * s[2 * a + 1]
        pi[a] = s[2 * N + 2 * a] + 1j * s[2 * N + 2 * a + 1]
    zb = np.conj(z)
    sfac = 1.0
    w = 0.0 + 0.0j
    for a in range(N):
        sfac += (z[a] * zb[a]).real
        w += z[a] * pi[a]
    wb = np.conj(w)
    psum = par[3] * par[3]
    for a in range(N):
        psum += par[4 + a] * par[4 + a] / (z[a] * zb[a]).real
    pibar = np.conj(pi)
    pipib = 0.0
    for a in range(N):
        pipib += (pi[a] * pibar[a]).real
    # dH/dpi_a and dH/dz_a (Wirtinger)
    dHdpi = np.empty(N, np.complex128)
    dHdz = np.empty(N, np.complex128)
    for a in range(N):
        dHdpi[a] = sfac * (pibar[a] + wb * z[a]) / (r0 * r0)
        oma2 = par[4 + a] * par[4 + a]
        dHdz[a] = (zb[a] * (pipib + (w * wb).real) + sfac * wb * pi[a]) / (r0 * r0) \
            + r0 * r0 * (zb[a] * psum - sfac * oma2 / (z[a] * z[a] * zb[a]))
    # zdot = dH/dpi ; pidot = -dH/dz - i B r0^2 (G conj(dH/dpi))
    Gc = np.empty(N, np.complex128)
    for b in range(N):
        acc = 0.0 + 0.0j
        for a in range(N):
            gba = (1.0 if a == b else 0.0) / sfac - zb[b] * z[a] / (sfac * sfac)
            acc += gba * np.conj(dHdpi[a])
        Gc[b] = acc
    out = np.empty(4 * N)
    for a in range(N):
        zdot = dHdpi[a]
        pidot = -dHdz[a] - 1j * B * r0 * r0 * Gc[a]
        out[2 * a] = zdot.real
        out[2 * a + 1] = zdot.imag
        out[2 * N + 2 * a] = pidot.real
        out[2 * N + 2 * a + 1] = pidot.imag
    return out


@njit(cache=True)
def flow_kappa_radial(s, par):
    # state (x, Phi_1..M, p, I_1..M); par = [M, which, coupling, kappa, c0, k_1..k_M]
    M = int(par[0])
    which = par[1]  # 0 oscillator, 1 coulomb
    c = par[2]
    kap = par[3]
    c0 = par[4]
    x = s[0]
    p = s[M + 1]
    acc = c0
    for a in range(M):
        acc += par[5 + a] * s[M + 2 + a]
    curlyI = 0.5 * acc * acc
    if kap > 0:
        rk = np.sqrt(kap)
        S = np.sin(rk * x) / rk
        C = np.cos(rk * x)
    elif kap < 0:
        rk = np.sqrt(-kap)
        S = np.sinh(rk * x) / rk
        C = np.cosh(rk * x)
    else:
        S = x
        C = 1.0
    T = S / C
    out = np.zeros(2 * (M + 1))
    out[0] = p
    if which == 0.0:
        dV = c * c * T / (C * C)
    else:
        dV = c / (S * S)
    out[M + 1] = 2 * curlyI * C / S ** 3 - dV
    for a in range(M):
        out[1 + a] = par[5 + a] * acc / (S * S)
    return out


@njit(cache=True)
def flow_recursive_angular(s, par):
    # state (theta_1..M, p_1..M); par = [M, c0, k_1..k_M]
    M = int(par[0])
    c0 = par[1]
    out = np.empty(2 * M)
    # chain factors F_a = prod_{m>a} 1/sin^2(k_m theta_m), F_0 includes m=1..M
    F = np.empty(M + 1)
    F[M] = 1.0
    for m in range(M, 0, -1):
        sm = np.sin(par[1 + m] * s[m - 1])
        F[m - 1] = F[m] / (sm * sm)
    # j_{a-1} partial sums
    j = c0 * c0
    for a in range(1, M + 1):
        ka = par[1 + a]
        th = s[a - 1]
        pa = s[M + a - 1]
        out[a - 1] = pa * F[a]
        sa = np.sin(ka * th)
        ca = np.cos(ka * th)
        out[M + a - 1] = ka * (ca / sa) * j * F[a] / (sa * sa)
        j = pa * pa + j / (sa * sa)
    return out


@njit(cache=True)
def flow_gmicz(s, par):
    # state (q1..q3, p1..p3); par = [s_charge, gamma, g1, g2]
    sc, gam, g1, g2 = par[0], par[1], par[2], par[3]
    q = s[:3]
    p = s[3:]
    r = np.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2)
    out = np.empty(6)
    for i in range(3):
        out[i] = p[i]
    # grad of s^2/2r^2 + g1^2/(r^2+r q3) + g2^2/(r^2-r q3) - gamma/r
    d1 = (r * r + r * q[2])
    d2 = (r * r - r * q[2])
    for i in range(3):
        dr = q[i] / r
        grad = (-sc * sc / r ** 3 + gam / r ** 2) * dr
        # dV1/dq_i = -g1^2 (2r dr + dr q3 + r delta_{i3})/d1^2
        delta3 = 1.0 if i == 2 else 0.0
        grad += -g1 * g1 * (2 * r * dr + dr * q[2] + r * delta3) / (d1 * d1)
        grad += -g2 * g2 * (2 * r * dr - dr * q[2] - r * delta3) / (d2 * d2)
        out[3 + i] = -grad
    # monopole Lorentz term: pdot_k += s (q x p)_k / r^3
    out[3] += sc * (q[1] * p[2] - q[2] * p[1]) / r ** 3
    out[4] += sc * (q[2] * p[0] - q[0] * p[2]) / r ** 3
    out[5] += sc * (q[0] * p[1] - q[1] * p[0]) / r ** 3
    return out
