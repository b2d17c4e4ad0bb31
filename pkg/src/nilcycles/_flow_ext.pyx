# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) first-return kernel.

Same algorithm and signature as ``nilcycles._flow_py.first_return``; the
integration loop runs without the GIL so radius scans can use threads.
"""

from libc.math cimport sqrt, fabs, hypot, pow, INFINITY
from libc.stdlib cimport malloc, realloc, free

cdef enum:
    MAXDEG = 64

cdef enum:
    RETURNED = 0
    ESCAPED = 1
    TIMED_OUT = 2
    STEP_UNDERFLOW = 3
    CAPTURED = 4

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double SAFETY = 0.9, FAC_MIN = 0.2, FAC_MAX = 10.0


cdef struct Field:
    int nphi
    int npsi
    int deg
    int *pi
    int *pj
    double *pc
    int *qi
    int *qj
    double *qc


cdef struct StepOut:
    double x
    double y
    double kx
    double ky
    double ex
    double ey


cdef inline void rhs(Field *f, double x, double y, double *fx, double *fy) noexcept nogil:
    cdef double xp[MAXDEG + 1]
    cdef double yp[MAXDEG + 1]
    cdef int k
    cdef double sx = 0.0, sy = 0.0
    xp[0] = 1.0
    yp[0] = 1.0
    for k in range(1, f.deg + 1):
        xp[k] = xp[k - 1] * x
        yp[k] = yp[k - 1] * y
    for k in range(f.nphi):
        sx += f.pc[k] * xp[f.pi[k]] * yp[f.pj[k]]
    for k in range(f.npsi):
        sy += f.qc[k] * xp[f.qi[k]] * yp[f.qj[k]]
    fx[0] = sx
    fy[0] = sy


cdef StepOut step(Field *f, double x, double y, double kx1, double ky1, double h) noexcept nogil:
    cdef double kx2, ky2, kx3, ky3, kx4, ky4, kx5, ky5, kx6, ky6, kx7, ky7
    cdef StepOut o
    rhs(f, x + h * A21 * kx1, y + h * A21 * ky1, &kx2, &ky2)
    rhs(f, x + h * (A31 * kx1 + A32 * kx2), y + h * (A31 * ky1 + A32 * ky2), &kx3, &ky3)
    rhs(f, x + h * (A41 * kx1 + A42 * kx2 + A43 * kx3),
        y + h * (A41 * ky1 + A42 * ky2 + A43 * ky3), &kx4, &ky4)
    rhs(f, x + h * (A51 * kx1 + A52 * kx2 + A53 * kx3 + A54 * kx4),
        y + h * (A51 * ky1 + A52 * ky2 + A53 * ky3 + A54 * ky4), &kx5, &ky5)
    rhs(f, x + h * (A61 * kx1 + A62 * kx2 + A63 * kx3 + A64 * kx4 + A65 * kx5),
        y + h * (A61 * ky1 + A62 * ky2 + A63 * ky3 + A64 * ky4 + A65 * ky5), &kx6, &ky6)
    o.x = x + h * (B1 * kx1 + B3 * kx3 + B4 * kx4 + B5 * kx5 + B6 * kx6)
    o.y = y + h * (B1 * ky1 + B3 * ky3 + B4 * ky4 + B5 * ky5 + B6 * ky6)
    rhs(f, o.x, o.y, &kx7, &ky7)
    o.kx = kx7
    o.ky = ky7
    o.ex = h * (E1 * kx1 + E3 * kx3 + E4 * kx4 + E5 * kx5 + E6 * kx6 + E7 * kx7)
    o.ey = h * (E1 * ky1 + E3 * ky3 + E4 * ky4 + E5 * ky5 + E6 * ky6 + E7 * ky7)
    return o


cdef double locate(Field *f, double x, double y, double kx, double ky, double h,
                   double g0, double g1, double *s_out) noexcept nogil:
    cdef double lo = 0.0, hi = h, glo = g0, ghi = g1
    cdef int side = 0, it
    cdef double s = h, xs = x, ys
    cdef StepOut o
    for it in range(100):
        s = (lo * ghi - hi * glo) / (ghi - glo)
        if not (lo < s and s < hi):
            s = 0.5 * (lo + hi)
        o = step(f, x, y, kx, ky, s)
        xs = o.x
        ys = o.y
        if ys == 0.0 or hi - lo <= 4e-16 * fabs(h):
            break
        if (ys < 0.0) == (glo < 0.0):
            lo = s
            glo = ys
            if side == -1:
                ghi *= 0.5
            side = -1
        else:
            hi = s
            ghi = ys
            if side == 1:
                glo *= 0.5
            side = 1
        if fabs(ys) <= 1e-17 * (fabs(xs) + fabs(y)):
            break
    s_out[0] = s
    return xs


cdef struct Buffer:
    double *data
    Py_ssize_t n
    Py_ssize_t cap


cdef int push3(Buffer *b, double t, double x, double y) noexcept nogil:
    cdef double *tmp
    if b.n + 3 > b.cap:
        b.cap = 2 * b.cap + 3
        tmp = <double *> realloc(b.data, b.cap * sizeof(double))
        if tmp == NULL:
            return -1
        b.data = tmp
    b.data[b.n] = t
    b.data[b.n + 1] = x
    b.data[b.n + 2] = y
    b.n += 3
    return 0


cdef int integrate(Field *f, double x, double y, double rtol, double atol,
                   double max_step, double max_time, long max_steps, double box,
                   double inner, bint stop_on_return, Buffer *buf,
                   double *x_out, double *t_out, long *n_out) noexcept nogil:
    cdef double t = 0.0, kx, ky, direction, sx, sy, d0, d1, h, err, fac, xr, s
    cdef long n = 0
    cdef StepOut o
    cdef int status = TIMED_OUT
    rhs(f, x, y, &kx, &ky)
    direction = -1.0 if ky < 0.0 else 1.0
    if buf != NULL:
        push3(buf, t, x, y)
    sx = atol + rtol * fabs(x)
    sy = atol + rtol * fabs(y)
    d0 = sqrt(((x / sx) * (x / sx) + (y / sy) * (y / sy)) / 2)
    d1 = sqrt(((kx / sx) * (kx / sx) + (ky / sy) * (ky / sy)) / 2)
    if d0 > 1e-5 and d1 > 1e-5:
        h = 0.01 * d0 / d1
    else:
        h = 1e-6
    if h > max_step:
        h = max_step
    while True:
        if n >= max_steps:
            status = TIMED_OUT
            break
        if t >= max_time:
            status = TIMED_OUT
            break
        if not stop_on_return and t + h > max_time:
            h = max_time - t
        if h <= 1e-14 * (fabs(t) if fabs(t) > 1.0 else 1.0):
            status = STEP_UNDERFLOW
            break
        o = step(f, x, y, kx, ky, h)
        sx = atol + rtol * (fabs(x) if fabs(x) > fabs(o.x) else fabs(o.x))
        sy = atol + rtol * (fabs(y) if fabs(y) > fabs(o.y) else fabs(o.y))
        err = sqrt(((o.ex / sx) * (o.ex / sx) + (o.ey / sy) * (o.ey / sy)) / 2)
        if err != err:
            h *= 0.2
            continue
        if err > 1.0:
            fac = SAFETY * pow(err, -0.2)
            h *= fac if fac > FAC_MIN else FAC_MIN
            continue
        n += 1
        if stop_on_return and y * direction < 0.0 and 0.0 <= o.y * direction:
            xr = locate(f, x, y, kx, ky, h, y, o.y, &s)
            if xr > 0.0:
                if buf != NULL:
                    push3(buf, t + s, xr, 0.0)
                x_out[0] = xr
                t_out[0] = t + s
                n_out[0] = n
                return RETURNED
        t += h
        x = o.x
        y = o.y
        kx = o.kx
        ky = o.ky
        if buf != NULL:
            push3(buf, t, x, y)
        if fabs(x) > box or fabs(y) > box:
            status = ESCAPED
            break
        if inner > 0.0 and hypot(x, y) < inner:
            status = CAPTURED
            break
        if err == 0.0:
            fac = FAC_MAX
        else:
            fac = SAFETY * pow(err, -0.2)
            if fac > FAC_MAX:
                fac = FAC_MAX
            if fac < FAC_MIN:
                fac = FAC_MIN
        h = h * fac
        if h > max_step:
            h = max_step
    x_out[0] = x
    t_out[0] = t
    n_out[0] = n
    return status


def first_return(phi_terms, psi_terms, double x0, double y0, double rtol, double atol,
                 double max_step, double max_time, long max_steps=10_000_000,
                 double box=1e3, double inner=0.0, bint stop_on_return=True,
                 bint record=False):
    """Integrate from (x0, y0) until the next same-direction crossing of y = 0, x > 0.

    Returns ``(status, x_return, t_return, n_steps, trajectory)``.
    """
    phi_terms = list(phi_terms)
    psi_terms = list(psi_terms)
    cdef Field f
    cdef int k, status
    cdef double xr = 0.0, tr = 0.0
    cdef long n = 0
    cdef Buffer buf
    cdef Buffer *bufp = NULL
    f.nphi = len(phi_terms)
    f.npsi = len(psi_terms)
    f.deg = 0
    f.pi = <int *> malloc((f.nphi + 1) * sizeof(int))
    f.pj = <int *> malloc((f.nphi + 1) * sizeof(int))
    f.pc = <double *> malloc((f.nphi + 1) * sizeof(double))
    f.qi = <int *> malloc((f.npsi + 1) * sizeof(int))
    f.qj = <int *> malloc((f.npsi + 1) * sizeof(int))
    f.qc = <double *> malloc((f.npsi + 1) * sizeof(double))
    buf.data = NULL
    buf.n = 0
    buf.cap = 0
    try:
        for k, (i, j, c) in enumerate(phi_terms):
            f.pi[k] = i
            f.pj[k] = j
            f.pc[k] = c
            f.deg = max(f.deg, i, j)
        for k, (i, j, c) in enumerate(psi_terms):
            f.qi[k] = i
            f.qj[k] = j
            f.qc[k] = c
            f.deg = max(f.deg, i, j)
        if f.deg > MAXDEG:
            raise ValueError(f"degree above {MAXDEG} not supported by the compiled kernel")
        if record:
            bufp = &buf
        with nogil:
            status = integrate(&f, x0, y0, rtol, atol, max_step, max_time, max_steps,
                               box, inner, stop_on_return, bufp, &xr, &tr, &n)
        traj = None
        if record:
            traj = [buf.data[k] for k in range(buf.n)]
        return status, xr, tr, n, traj
    finally:
        free(f.pi)
        free(f.pj)
        free(f.pc)
        free(f.qi)
        free(f.qj)
        free(f.qc)
        free(buf.data)
