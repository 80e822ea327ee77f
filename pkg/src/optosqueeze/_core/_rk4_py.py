"""Pure-Python twin of the compiled RK4 kernel (same arithmetic, same order)."""
from __future__ import annotations

import math


def integrate(y0, t0, dt, n_steps, A, g, alpha, depth, two_p, phase, nu1, nu2, out, limit):
    if len(nu1) < 2 * n_steps + 1 or len(nu2) < 2 * n_steps + 1:
        raise ValueError("forcing arrays must hold 2 * n_steps + 1 samples")
    if out.shape[0] < n_steps + 1 or out.shape[1] != 4:
        raise ValueError("out must have shape (n_steps + 1, 4)")
    nu1 = nu1.tolist()
    nu2 = nu2.tolist()
    b, bd, z, zd = (float(v) for v in y0)
    rows = [(b, bd, z, zd)]
    half = 0.5 * dt
    cos = math.cos
    done = n_steps
    for k in range(n_steps):
        t = t0 + k * dt
        a0 = A * (1.0 + 2.0 * depth * cos(two_p * t + phase))
        ah = A * (1.0 + 2.0 * depth * cos(two_p * (t + half) + phase))
        a1 = A * (1.0 + 2.0 * depth * cos(two_p * (t + dt) + phase))
        n1a, n1b, n1c = nu1[2 * k], nu1[2 * k + 1], nu1[2 * k + 2]
        n2a, n2b, n2c = nu2[2 * k], nu2[2 * k + 1], nu2[2 * k + 2]

        k1 = (bd, -g * bd - 2.0 * b - a0 * z + n1a, zd, a0 * b + alpha * bd + n2a)
        y2 = (b + half * k1[0], bd + half * k1[1], z + half * k1[2], zd + half * k1[3])
        k2 = (y2[1], -g * y2[1] - 2.0 * y2[0] - ah * y2[2] + n1b, y2[3],
              ah * y2[0] + alpha * y2[1] + n2b)
        y3 = (b + half * k2[0], bd + half * k2[1], z + half * k2[2], zd + half * k2[3])
        k3 = (y3[1], -g * y3[1] - 2.0 * y3[0] - ah * y3[2] + n1b, y3[3],
              ah * y3[0] + alpha * y3[1] + n2b)
        y4 = (b + dt * k3[0], bd + dt * k3[1], z + dt * k3[2], zd + dt * k3[3])
        k4 = (y4[1], -g * y4[1] - 2.0 * y4[0] - a1 * y4[2] + n1c, y4[3],
              a1 * y4[0] + alpha * y4[1] + n2c)

        b += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        bd += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        z += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        zd += dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        rows.append((b, bd, z, zd))
        if not b * b + bd * bd + z * z + zd * zd <= limit * limit:
            done = k + 1
            break
    out[:len(rows)] = rows
    return done
