# cython: language_level=3
"""Compiled kernels and ensemble quadrature.

Same interface and algorithm as ``qdslow._pykernels``; see that module for
the kernel ids and parameter layout.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, exp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double complex I = 1j

cdef double XK[15]
cdef double WK[15]
cdef double WG[15]

_xk = (0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
       0.207784955007898467600689403773245, 0.0)
_wk = (0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
       0.204432940075298892414161999234649, 0.209482141084727828012999174891714)
_wg = {1: 0.129484966168869693270611432679082, 3: 0.279705391489276667901467771423780,
       5: 0.381830050505118944950369775488975, 7: 0.417959183673469387755102040816327}
for _i in range(7):
    XK[_i] = -_xk[_i]
    XK[14 - _i] = _xk[_i]
    WK[_i] = _wk[_i]
    WK[14 - _i] = _wk[_i]
    WG[_i] = _wg.get(_i, 0.0)
    WG[14 - _i] = _wg.get(_i, 0.0)
XK[7] = 0.0
WK[7] = _wk[7]
WG[7] = _wg[7]


cdef struct Params:
    int kid
    double G13, G23, G12, g13, g23, g12
    int verbatim
    double om2


cdef Params _unpack(int kid, double[::1] p, double omega):
    cdef Params q
    q.kid = kid
    q.om2 = omega * omega
    if kid == 3:
        q.g13 = p[0]
        q.G23 = p[1]
        return q
    q.G13, q.G23, q.G12 = p[0], p[1], p[2]
    q.g13, q.g23, q.g12 = p[3], p[4], p[5]
    q.verbatim = p[6] != 0.0
    return q


cdef inline void _eval(Params* q, double dp, double dc, double complex* val,
                       double complex* der, bint deriv) nogil:
    cdef double complex a, b, num, d, pp, nm, den, dnum, dden
    cdef double G1, G2, zeta, qq, s, sat
    if q.kid == 3:
        sat = 4.0 * q.om2 * q.g13 / q.G23 if q.om2 > 0 else 0.0
        val[0] = -(dc - I * q.g13) / (dc * dc + q.g13 * q.g13 + sat)
        der[0] = 0
        return
    b = dp + I * q.g13
    if q.kid == 0 or q.kid == 2:
        if q.om2 == 0:
            # bare two-level line; the closed form is 0/0 when a vanishes
            val[0] = -1.0 / b
            if deriv:
                der[0] = 1.0 / (b * b)
            return
        if q.kid == 0:
            a = dp + dc + I * q.g12
            num = a
        else:
            a = dp - dc + I * q.g12
            num = (dp - dc + 0.5 * I * q.g12) if q.verbatim else a
        d = q.om2 - a * b
        val[0] = num / d
        if deriv:
            der[0] = (d + num * (a + b)) / (d * d)
        return
    a = dp - dc + I * q.g12
    G1 = q.G13 - q.G12
    G2 = q.G23 + q.G12
    zeta = 2.0 * q.G13 * G2 * (dc * dc + q.g23 * q.g23)
    qq = q.g23 * (2.0 * q.G13 + q.G12)
    pp = q.g23 * (I * q.G13 * G2 - 2.0 * G1 * (dp + I * q.g12)) + dc * (q.G13 * G2 + 2.0 * q.g23 * G1)
    nm = 4.0 * q.om2 * pp - 2.0 * a * zeta
    s = zeta + 4.0 * q.om2 * qq
    den = 2.0 * (a * b - q.om2) * s
    val[0] = nm / den
    if deriv:
        dnum = -8.0 * q.om2 * q.g23 * G1 - 2.0 * zeta
        dden = 2.0 * (a + b) * s
        der[0] = (dnum * den - nm * dden) / (den * den)


def kernel_flat(int kid, params, dp, dc, double omega, bint deriv):
    """Kernel (or its derivative) on flat float arrays; backend entry point."""
    cdef double[::1] p = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] xp = np.ascontiguousarray(dp, dtype=np.float64).ravel()
    cdef double[::1] xc = np.ascontiguousarray(dc, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xp.shape[0], i
    if xc.shape[0] != n:
        raise ValueError("detuning arrays must have equal length")
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Params q = _unpack(kid, p, omega)
    cdef double complex v, dv
    with nogil:
        for i in range(n):
            _eval(&q, xp[i], xc[i], &v, &dv, deriv)
            o[i] = dv if deriv else v
    return out


cdef void _panel(Params* q, double dp, double dc, double kappa, double sd,
                 double norm, double a, double b, bint deriv,
                 double complex* ik, double* ek, double complex* dk,
                 double* ed) nogil:
    cdef double half = 0.5 * (b - a), mid = 0.5 * (b + a), x, f, t
    cdef double complex sk = 0, sg = 0, tk = 0, tg = 0, v, dv
    cdef int j
    for j in range(15):
        x = mid + half * XK[j]
        t = x / sd
        f = norm * exp(-0.5 * t * t)
        _eval(q, dp - x, dc - kappa * x, &v, &dv, deriv)
        v = f * v
        sk = sk + WK[j] * v
        sg = sg + WG[j] * v
        if deriv:
            dv = f * dv
            tk = tk + WK[j] * dv
            tg = tg + WG[j] * dv
    ik[0] = sk * half
    ek[0] = abs((sk - sg) * half)
    dk[0] = tk * half
    ed[0] = abs((tk - tg) * half)


def ensemble_average(int kid, params, double dp, double dc, double kappa,
                     double omega, double sd, double norm, edges, double rtol,
                     double atol_chi, double atol_d, int max_panels, bint deriv):
    """Adaptive GK7/15 average of the kernel over a truncated Gaussian.

    Returns ``(chi, dchi, n_evals, ok, worst_a, worst_b, worst_err)``.
    """
    cdef double[::1] p = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[::1] e0 = np.ascontiguousarray(edges, dtype=np.float64)
    cdef Params q = _unpack(kid, p, omega)
    cdef int n = e0.shape[0] - 1, cap = max(max_panels, n), i, nbad, worst
    cdef double length = e0[n] - e0[0]
    cdef double *pa = <double*> malloc(cap * sizeof(double))
    cdef double *pb = <double*> malloc(cap * sizeof(double))
    cdef double *ek = <double*> malloc(cap * sizeof(double))
    cdef double *ed = <double*> malloc(cap * sizeof(double))
    cdef double *er = <double*> malloc(cap * sizeof(double))
    cdef double complex *ik = <double complex*> malloc(cap * sizeof(double complex))
    cdef double complex *dk = <double complex*> malloc(cap * sizeof(double complex))
    cdef double complex chi = 0, dchi = 0
    cdef double tol_c, tol_d, esum, m, emax
    cdef long nev = 0
    cdef int per = 15  # value and derivative share one kernel call
    cdef bint ok = False
    if not (pa and pb and ek and ed and er and ik and dk):
        free(pa); free(pb); free(ek); free(ed); free(er); free(ik); free(dk)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                pa[i] = e0[i]
                pb[i] = e0[i + 1]
                _panel(&q, dp, dc, kappa, sd, norm, pa[i], pb[i], deriv,
                       &ik[i], &ek[i], &dk[i], &ed[i])
            nev = per * n
            while True:
                chi = 0
                dchi = 0
                for i in range(n):
                    chi = chi + ik[i]
                    dchi = dchi + dk[i]
                tol_c = rtol * abs(chi) + atol_chi
                tol_d = rtol * abs(dchi) + atol_d
                esum = 0.0
                nbad = 0
                for i in range(n):
                    er[i] = ek[i] / tol_c
                    if deriv and ed[i] / tol_d > er[i]:
                        er[i] = ed[i] / tol_d
                    esum += er[i]
                if esum <= 1.0:
                    ok = True
                    break
                if esum != esum:  # non-finite integrand: no bisection can help
                    break
                for i in range(n):
                    if er[i] > (pb[i] - pa[i]) / length:
                        nbad += 1
                if nbad == 0 or n + nbad > max_panels:
                    break
                worst = n
                for i in range(worst):
                    if er[i] > (pb[i] - pa[i]) / length:
                        m = 0.5 * (pa[i] + pb[i])
                        pa[n] = m
                        pb[n] = pb[i]
                        pb[i] = m
                        _panel(&q, dp, dc, kappa, sd, norm, pa[i], pb[i], deriv,
                               &ik[i], &ek[i], &dk[i], &ed[i])
                        _panel(&q, dp, dc, kappa, sd, norm, pa[n], pb[n], deriv,
                               &ik[n], &ek[n], &dk[n], &ed[n])
                        n += 1
                        nev += 2 * per
        if ok:
            return complex(chi), complex(dchi), nev, True, 0.0, 0.0, 0.0
        worst = 0
        emax = -1.0
        for i in range(n):
            if er[i] > emax or er[i] != er[i]:
                emax = er[i] if er[i] == er[i] else INFINITY
                worst = i
        return (complex(chi), complex(dchi), nev, False, pa[worst], pb[worst],
                max(ek[worst], ed[worst]) if emax < INFINITY else INFINITY)
    finally:
        free(pa); free(pb); free(ek); free(ed); free(er); free(ik); free(dk)
