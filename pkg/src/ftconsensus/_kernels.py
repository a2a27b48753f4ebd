"""Compiled closed-loop vector fields for the regularized (gamma > 0) protocols.

Packed state layouts match ``SwarmState.pack``. Each kernel returns
``(dy, u)``; ``delta`` is the disturbance already evaluated at ``t``.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def fixed_time_field(y, a, lam, rho, gamma, delta):
    n = a.shape[0]
    dy = np.empty(2 * n)
    u = np.empty(n)
    for i in range(n):
        z = 0.0
        q = 0.0
        for j in range(n):
            aij = a[i, j]
            if aij != 0.0:
                r = y[j] - y[i]
                z += aij * r
                q += aij * r * r
        theta = y[n + i]
        u[i] = theta * z / (z * z + gamma)
        dy[i] = u[i] + delta[i]
        dy[n + i] = -lam * theta + rho * q
    return dy, u


@njit(cache=True)
def _edge_sums(y, a, gamma, nominal, q):
    n = a.shape[0]
    for i in range(n):
        s = 0.0
        qi = 0.0
        ti = y[n + i]
        for j in range(n):
            aij = a[i, j]
            if aij != 0.0:
                r = y[j] - y[i]
                r2 = r * r
                s += aij * (ti + y[n + j]) * r / (r2 + gamma)
                qi += aij * r2
        nominal[i] = s
        q[i] = qi


@njit(cache=True)
def weighted_field(y, a, inv_p, lam, rho, gamma, delta):
    """Average protocol when ``inv_p`` is all ones, weighted protocol otherwise."""
    n = a.shape[0]
    nominal = np.empty(n)
    q = np.empty(n)
    _edge_sums(y, a, gamma, nominal, q)
    dy = np.empty(2 * n)
    u = np.empty(n)
    for i in range(n):
        u[i] = nominal[i] * inv_p[i]
        dy[i] = u[i] + delta[i]
        dy[n + i] = -lam * y[n + i] + rho * q[i]
    return dy, u


@njit(cache=True)
def sliding_field(y, a, xbar, lam, rho, gamma, d, omega_s, mu, delta):
    n = a.shape[0]
    nominal = np.empty(n)
    q = np.empty(n)
    _edge_sums(y, a, gamma, nominal, q)
    dy = np.empty(4 * n)
    u = np.empty(n)
    for i in range(n):
        s = y[i] - xbar[i] - y[3 * n + i]
        sgn = 1.0 if s > 0.0 else (-1.0 if s < 0.0 else 0.0)
        eta = y[2 * n + i]
        u[i] = nominal[i] - (eta + d) * sgn
        dy[i] = u[i] + delta[i]
        dy[n + i] = -lam * y[n + i] + rho * q[i]
        dy[2 * n + i] = -omega_s * eta + mu * abs(s)
        dy[3 * n + i] = nominal[i]
    return dy, u
