# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fixed-step RK4 for the pumped cavity-mirror equations (compiled kernel)."""
from libc.math cimport cos, fabs

import numpy as np


cdef inline void deriv(double b, double bd, double z, double zd, double amp,
                       double g, double alpha, double n1, double n2,
                       double* out) noexcept nogil:
    out[0] = bd
    out[1] = -g * bd - 2.0 * b - amp * z + n1
    out[2] = zd
    out[3] = amp * b + alpha * bd + n2


def integrate(double[::1] y0, double t0, double dt, Py_ssize_t n_steps,
              double A, double g, double alpha, double depth, double two_p, double phase,
              const double[::1] nu1, const double[::1] nu2, double[:, ::1] out,
              double limit):
    """Integrate ``n_steps`` steps; ``nu`` is sampled on the half-step grid.

    ``out[k]`` receives the state at ``t0 + k dt`` (``n_steps + 1`` rows).
    Returns the number of completed steps (smaller than ``n_steps`` if the
    state norm exceeded ``limit``).
    """
    cdef double y[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double half = 0.5 * dt
    cdef double t, a0, ah, a1, n
    cdef Py_ssize_t k, i, done = n_steps
    if nu1.shape[0] < 2 * n_steps + 1 or nu2.shape[0] < 2 * n_steps + 1:
        raise ValueError("forcing arrays must hold 2 * n_steps + 1 samples")
    if out.shape[0] < n_steps + 1 or out.shape[1] != 4:
        raise ValueError("out must have shape (n_steps + 1, 4)")
    for i in range(4):
        y[i] = y0[i]
        out[0, i] = y[i]
    with nogil:
        for k in range(n_steps):
            t = t0 + k * dt
            a0 = A * (1.0 + 2.0 * depth * cos(two_p * t + phase))
            ah = A * (1.0 + 2.0 * depth * cos(two_p * (t + half) + phase))
            a1 = A * (1.0 + 2.0 * depth * cos(two_p * (t + dt) + phase))
            deriv(y[0], y[1], y[2], y[3], a0, g, alpha, nu1[2 * k], nu2[2 * k], k1)
            deriv(y[0] + half * k1[0], y[1] + half * k1[1], y[2] + half * k1[2],
                  y[3] + half * k1[3], ah, g, alpha, nu1[2 * k + 1], nu2[2 * k + 1], k2)
            deriv(y[0] + half * k2[0], y[1] + half * k2[1], y[2] + half * k2[2],
                  y[3] + half * k2[3], ah, g, alpha, nu1[2 * k + 1], nu2[2 * k + 1], k3)
            deriv(y[0] + dt * k3[0], y[1] + dt * k3[1], y[2] + dt * k3[2],
                  y[3] + dt * k3[3], a1, g, alpha, nu1[2 * k + 2], nu2[2 * k + 2], k4)
            n = 0.0
            for i in range(4):
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                out[k + 1, i] = y[i]
                n += y[i] * y[i]
            if not n <= limit * limit:
                done = k + 1
                break
    return done
