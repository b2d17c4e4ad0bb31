"""Pure-Python Dormand-Prince 5(4) kernel with first-return detection.

Mirrors ``_flow_ext.pyx`` line for line; ``nilcycles.flow`` picks whichever
is available.  A vector field is given as two lists of ``(i, j, c)``
monomials.
"""

from __future__ import annotations

import math

RETURNED, ESCAPED, TIMED_OUT, STEP_UNDERFLOW, CAPTURED = 0, 1, 2, 3, 4

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

SAFETY, FAC_MIN, FAC_MAX = 0.9, 0.2, 10.0


def _make_rhs(phi_terms, psi_terms):
    deg = max([i for i, _, _ in phi_terms + psi_terms] + [j for _, j, _ in phi_terms + psi_terms] + [0])

    def rhs(x, y):
        xp = [1.0] * (deg + 1)
        yp = [1.0] * (deg + 1)
        for k in range(1, deg + 1):
            xp[k] = xp[k - 1] * x
            yp[k] = yp[k - 1] * y
        fx = 0.0
        for i, j, c in phi_terms:
            fx += c * xp[i] * yp[j]
        fy = 0.0
        for i, j, c in psi_terms:
            fy += c * xp[i] * yp[j]
        return fx, fy

    return rhs


def _step(rhs, x, y, kx1, ky1, h):
    # one DP5 step from (x, y) with FSAL derivative (kx1, ky1)
    kx2, ky2 = rhs(x + h * A21 * kx1, y + h * A21 * ky1)
    kx3, ky3 = rhs(x + h * (A31 * kx1 + A32 * kx2), y + h * (A31 * ky1 + A32 * ky2))
    kx4, ky4 = rhs(
        x + h * (A41 * kx1 + A42 * kx2 + A43 * kx3),
        y + h * (A41 * ky1 + A42 * ky2 + A43 * ky3),
    )
    kx5, ky5 = rhs(
        x + h * (A51 * kx1 + A52 * kx2 + A53 * kx3 + A54 * kx4),
        y + h * (A51 * ky1 + A52 * ky2 + A53 * ky3 + A54 * ky4),
    )
    kx6, ky6 = rhs(
        x + h * (A61 * kx1 + A62 * kx2 + A63 * kx3 + A64 * kx4 + A65 * kx5),
        y + h * (A61 * ky1 + A62 * ky2 + A63 * ky3 + A64 * ky4 + A65 * ky5),
    )
    xn = x + h * (B1 * kx1 + B3 * kx3 + B4 * kx4 + B5 * kx5 + B6 * kx6)
    yn = y + h * (B1 * ky1 + B3 * ky3 + B4 * ky4 + B5 * ky5 + B6 * ky6)
    kx7, ky7 = rhs(xn, yn)
    ex = h * (E1 * kx1 + E3 * kx3 + E4 * kx4 + E5 * kx5 + E6 * kx6 + E7 * kx7)
    ey = h * (E1 * ky1 + E3 * ky3 + E4 * ky4 + E5 * ky5 + E6 * ky6 + E7 * ky7)
    return xn, yn, kx7, ky7, ex, ey


def _locate(rhs, x, y, kx, ky, h, g0, g1):
    # Illinois regula falsi on s -> y(step(s)); g0 < 0 <= g1 after orientation
    lo, hi = 0.0, h
    glo, ghi = g0, g1
    side = 0
    xs = x
    for _ in range(100):
        s = (lo * ghi - hi * glo) / (ghi - glo)
        if not (lo < s < hi):
            s = 0.5 * (lo + hi)
        xs, ys, _, _, _, _ = _step(rhs, x, y, kx, ky, s)
        if ys == 0.0 or hi - lo <= 4e-16 * abs(h):
            break
        if (ys < 0.0) == (glo < 0.0):
            lo, glo = s, ys
            if side == -1:
                ghi *= 0.5
            side = -1
        else:
            hi, ghi = s, ys
            if side == 1:
                glo *= 0.5
            side = 1
        if abs(ys) <= 1e-17 * (abs(xs) + abs(y)):
            break
    return xs, s


def first_return(
    phi_terms, psi_terms, x0, y0, rtol, atol, max_step, max_time,
    max_steps=10_000_000, box=1e3, inner=0.0, stop_on_return=True, record=False,
):
    """Integrate from (x0, y0) until the next same-direction crossing of y = 0, x > 0.

    Returns ``(status, x_return, t_return, n_steps, trajectory)``; the
    trajectory is a flat list ``[t0, x0, y0, t1, ...]`` when ``record`` is
    set, else None.  With ``stop_on_return`` false the flow is followed to
    ``max_time`` and the status is TIMED_OUT unless something else stops it.
    """
    rhs = _make_rhs(list(phi_terms), list(psi_terms))
    x, y, t = float(x0), float(y0), 0.0
    kx, ky = rhs(x, y)
    direction = -1.0 if ky < 0.0 else 1.0
    traj = [t, x, y] if record else None

    sx = atol + rtol * abs(x)
    sy = atol + rtol * abs(y)
    d0 = math.sqrt(((x / sx) ** 2 + (y / sy) ** 2) / 2)
    d1 = math.sqrt(((kx / sx) ** 2 + (ky / sy) ** 2) / 2)
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h = min(h, max_step)

    n = 0
    while n < max_steps:
        if t >= max_time:
            return TIMED_OUT, x, t, n, traj
        if not stop_on_return and t + h > max_time:
            h = max_time - t
        if h <= 1e-14 * max(1.0, abs(t)):
            return STEP_UNDERFLOW, x, t, n, traj
        xn, yn, kxn, kyn, ex, ey = _step(rhs, x, y, kx, ky, h)
        sx = atol + rtol * max(abs(x), abs(xn))
        sy = atol + rtol * max(abs(y), abs(yn))
        err = math.sqrt(((ex / sx) ** 2 + (ey / sy) ** 2) / 2)
        if err != err:
            h *= 0.2
            continue
        if err > 1.0:
            h *= max(FAC_MIN, SAFETY * err ** -0.2)
            continue
        n += 1
        if stop_on_return and y * direction < 0.0 <= yn * direction:
            xr, s = _locate(rhs, x, y, kx, ky, h, y, yn)
            if xr > 0.0:
                if record:
                    traj.extend((t + s, xr, 0.0))
                return RETURNED, xr, t + s, n, traj
        t += h
        x, y, kx, ky = xn, yn, kxn, kyn
        if record:
            traj.extend((t, x, y))
        if abs(x) > box or abs(y) > box:
            return ESCAPED, x, t, n, traj
        if inner > 0.0 and math.hypot(x, y) < inner:
            return CAPTURED, x, t, n, traj
        fac = FAC_MAX if err == 0.0 else min(FAC_MAX, max(FAC_MIN, SAFETY * err ** -0.2))
        h = min(h * fac, max_step)
    return TIMED_OUT, x, t, n, traj
