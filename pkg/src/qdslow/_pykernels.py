"""Pure NumPy implementation of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; ``qdslow._backend`` picks
one at import.  Kernel ids and parameter layout:

    0 XI, 1 V, 2 LAMBDA: params = [G13, G23, G12, g13, g23, g12, verbatim]
    3 TWO_LEVEL_SAT:      params = [gamma, Gamma_eff]

All susceptibilities are in units of ``conf * mu13^2 / (V eps0 hbar)`` and
carry the normalization of a two-level line ``-1/(detuning + i gamma)``.
The saturated two-level kernel reads its detuning from the coupling
argument ``dc``.
"""

from __future__ import annotations

import numpy as np

XI, V, LAMBDA, TWO_LEVEL_SAT = 0, 1, 2, 3

# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # 15 ascending
GK_WK = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (0.949, 0.741, 0.405, 0)
GK_WG = np.zeros(15)
GK_WG[[1, 3, 5]] = _WG[:3]
GK_WG[7] = _WG[3]
GK_WG[[13, 11, 9]] = _WG[:3]


def kernel(kid, params, dp, dc, omega):
    dp = np.asarray(dp, dtype=float)
    dc = np.asarray(dc, dtype=float)
    p = params
    om2 = omega * omega
    if kid == TWO_LEVEL_SAT:
        g, geff = p[0], p[1]
        sat = 4.0 * om2 * g / geff if om2 > 0 else 0.0
        return -(dc - 1j * g) / (dc * dc + g * g + sat)
    G13, G23, G12, g13, g23, g12, verbatim = p[:7]
    b = dp + 1j * g13
    if kid in (XI, LAMBDA) and om2 == 0:
        # bare two-level line; the closed form is 0/0 when a vanishes
        return np.broadcast_to(-1.0 / b, np.broadcast(dp, dc).shape).astype(complex)
    if kid == XI:
        a = dp + dc + 1j * g12
        return a / (om2 - a * b)
    if kid == LAMBDA:
        a = dp - dc + 1j * g12
        num = (dp - dc + 0.5j * g12) if verbatim else a
        return num / (om2 - a * b)
    a = dp - dc + 1j * g12
    G1 = G13 - G12
    G2 = G23 + G12
    zeta = 2.0 * G13 * G2 * (dc * dc + g23 * g23)
    q = g23 * (2.0 * G13 + G12)
    pp = g23 * (1j * G13 * G2 - 2.0 * G1 * (dp + 1j * g12)) + dc * (G13 * G2 + 2.0 * g23 * G1)
    num = 4.0 * om2 * pp - 2.0 * a * zeta
    den = 2.0 * (a * b - om2) * (zeta + 4.0 * om2 * q)
    return num / den


def kernel_deriv(kid, params, dp, dc, omega):
    """Derivative of :func:`kernel` with respect to the probe detuning."""
    dp = np.asarray(dp, dtype=float)
    dc = np.asarray(dc, dtype=float)
    p = params
    om2 = omega * omega
    if kid == TWO_LEVEL_SAT:
        return np.zeros(np.broadcast(dp, dc).shape, dtype=complex)
    G13, G23, G12, g13, g23, g12, verbatim = p[:7]
    b = dp + 1j * g13
    if kid in (XI, LAMBDA):
        if om2 == 0:
            return np.broadcast_to(1.0 / (b * b), np.broadcast(dp, dc).shape).astype(complex)
        if kid == XI:
            a = dp + dc + 1j * g12
            num = a
        else:
            a = dp - dc + 1j * g12
            num = (dp - dc + 0.5j * g12) if verbatim else a
        d = om2 - a * b
        return (d + num * (a + b)) / (d * d)
    a = dp - dc + 1j * g12
    G1 = G13 - G12
    G2 = G23 + G12
    zeta = 2.0 * G13 * G2 * (dc * dc + g23 * g23)
    q = g23 * (2.0 * G13 + G12)
    pp = g23 * (1j * G13 * G2 - 2.0 * G1 * (dp + 1j * g12)) + dc * (G13 * G2 + 2.0 * g23 * G1)
    num = 4.0 * om2 * pp - 2.0 * a * zeta
    dnum = -8.0 * om2 * g23 * G1 - 2.0 * zeta
    s = zeta + 4.0 * om2 * q
    den = 2.0 * (a * b - om2) * s
    dden = 2.0 * (a + b) * s
    return (dnum * den - num * dden) / (den * den)


def _panels(kid, params, dp, dc, kappa, omega, sd, norm, a, b, deriv):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * GK_NODES[None, :]
    f = norm * np.exp(-0.5 * (x / sd) ** 2)
    tp = dp - x
    tc = dc - kappa * x
    v = f * kernel(kid, params, tp, tc, omega)
    ik = (v @ GK_WK) * half
    ig = (v @ GK_WG) * half
    if deriv:
        w = f * kernel_deriv(kid, params, tp, tc, omega)
        dk = (w @ GK_WK) * half
        dg = (w @ GK_WG) * half
    else:
        dk = np.zeros_like(ik)
        dg = dk
    return ik, np.abs(ik - ig), dk, np.abs(dk - dg)


def ensemble_average(kid, params, dp, dc, kappa, omega, sd, norm, edges,
                     rtol, atol_chi, atol_d, max_panels, deriv):
    """Adaptive GK7/15 average of the kernel over a truncated Gaussian.

    Returns ``(chi, dchi, n_evals, ok, worst_a, worst_b, worst_err)``.
    Panels whose normalized error exceeds their length share of the budget
    are bisected until the summed error meets the tolerance.
    """
    params = np.asarray(params, dtype=float)
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1].copy()
    b = edges[1:].copy()
    length = edges[-1] - edges[0]
    ik, ek, dk, ed = _panels(kid, params, dp, dc, kappa, omega, sd, norm, a, b, deriv)
    nev = 15 * a.size
    while True:
        chi = ik.sum()
        dchi = dk.sum()
        tol_c = rtol * abs(chi) + atol_chi
        tol_d = rtol * abs(dchi) + atol_d
        e = ek / tol_c
        if deriv:
            e = np.maximum(e, ed / tol_d)
        esum = e.sum()
        if esum <= 1.0:
            return chi, dchi, nev, True, 0.0, 0.0, 0.0
        bad = e > (b - a) / length
        nbad = int(bad.sum())
        if not np.isfinite(esum) or nbad == 0 or a.size + nbad > max_panels:
            # a non-finite integrand cannot be cured by bisection
            i = int(np.argmax(np.where(np.isfinite(e), e, np.inf)))
            err = max(ek[i], ed[i]) if np.isfinite(e[i]) else np.inf
            return chi, dchi, nev, False, a[i], b[i], float(err)
        ba, bb = a[bad], b[bad]
        m = 0.5 * (ba + bb)
        na = np.concatenate([ba, m])
        nb = np.concatenate([m, bb])
        nik, nek, ndk, ned = _panels(kid, params, dp, dc, kappa, omega, sd, norm, na, nb, deriv)
        nev += 15 * na.size
        keep = ~bad
        order = np.argsort(np.concatenate([a[keep], na]), kind="stable")
        a = np.concatenate([a[keep], na])[order]
        b = np.concatenate([b[keep], nb])[order]
        ik = np.concatenate([ik[keep], nik])[order]
        ek = np.concatenate([ek[keep], nek])[order]
        dk = np.concatenate([dk[keep], ndk])[order]
        ed = np.concatenate([ed[keep], ned])[order]


def kernel_flat(kid, params, dp, dc, omega, deriv):
    """Kernel (or its derivative) on flat float arrays; backend entry point."""
    params = np.asarray(params, dtype=float)
    fn = kernel_deriv if deriv else kernel
    return np.asarray(fn(kid, params, dp, dc, omega), dtype=complex)
