"""Pure-numpy implementations of the hot kernels.

The compiled Cython backend (``ahyper._ckernels``) exposes the same
functions with the same semantics; ``ahyper.kernels`` picks one at import
time. Keep the two in sync — the parity test compares them call by call.

State convention: points on the torus are handled in logarithmic
coordinates u (x = exp(u)), where a Laurent polynomial with exponent rows
E and coefficients c evaluates to ``sum_j c_j exp(<E_j, u>)`` and the
Euler derivatives theta_i = x_i d/dx_i become plain u-partials.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# descent-flow return statuses
FLOW_OK = 0
FLOW_STALL = 1
FLOW_MAXSTEPS = 2
FLOW_STEPFAIL = 3


def eval_h(E, c, u):
    """h(exp(u)) for exponent matrix E (m, n) and coefficients c (m,)."""
    return complex(np.exp(E @ u) @ c)


def eval_h_batch(E, c, U):
    """Vectorized evaluation at rows of U (k, n) -> (k,)."""
    return np.exp(U @ E.T) @ c


def eval_h_theta(E, c, u):
    """(h, g) with g_i = theta_i h = sum_j c_j E_ji exp(<E_j, u>)."""
    w = np.exp(E @ u) * c
    return complex(w.sum()), E.T.astype(np.complex128) @ w


def eval_h_theta_hess(E, c, u):
    """(h, g, Q) with Q_ik = theta_i theta_k h."""
    w = np.exp(E @ u) * c
    Ec = E.astype(np.complex128)
    g = Ec.T @ w
    Q = Ec.T @ (w[:, None] * Ec)
    return complex(w.sum()), g, Q


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                   187 / 2100, 1 / 40])


def flow_descent(E, c, u0, tau0, targets, rtol=1e-10, atol=1e-12,
                 max_steps=200000, stall_floor=0.0):
    """Integrate the reparametrized descent flow du/dtau = -conj(g)/|g|^2.

    tau is the drop of Re h below its value at the saddle; along the exact
    flow dh/dtau = -1 (so Im h is conserved and Re h falls at unit rate).
    Integration starts at (tau0, u0) and stops exactly at each entry of the
    increasing array ``targets``, recording u and g there.

    Returns (U, G, filled, status):
      U (len(targets), n), G same shape = theta-gradients at the nodes,
      filled = number of targets reached, status = FLOW_* code.
    """
    targets = np.asarray(targets, dtype=np.float64)
    n = len(u0)
    U = np.zeros((len(targets), n), dtype=np.complex128)
    G = np.zeros((len(targets), n), dtype=np.complex128)

    def rhs(u):
        _, g = eval_h_theta(E, c, u)
        g2 = float(np.sum(np.abs(g) ** 2))
        return g, g2

    u = np.array(u0, dtype=np.complex128)
    tau = float(tau0)
    g, g2 = rhs(u)
    if g2 <= stall_floor:
        return U, G, 0, FLOW_STALL
    h_step = min(0.1 * max(tau, 1e-8), 1e-3)
    steps = 0
    filled = 0
    k = np.zeros((7, n), dtype=np.complex128)
    while filled < len(targets):
        tgt = targets[filled]
        if tgt <= tau + 1e-15 * max(1.0, tau):
            # node at/behind current position (can only be the first ones)
            U[filled] = u
            G[filled] = g
            filled += 1
            continue
        clipped = False
        if tau + h_step >= tgt:
            h_try = tgt - tau
            clipped = True
        else:
            h_try = h_step
        # one embedded DP step
        k[0] = -np.conj(g) / g2
        ok = True
        for i in range(1, 7):
            ui = u + h_try * (_DP_A[i][:i] @ k[:i])
            gi, gi2 = rhs(ui)
            if gi2 <= stall_floor:
                return U, G, filled, FLOW_STALL
            k[i] = -np.conj(gi) / gi2
        y5 = u + h_try * (_DP_B5 @ k)
        y4 = u + h_try * (_DP_B4 @ k)
        sc = atol + rtol * np.maximum(np.abs(u), np.abs(y5))
        err = float(np.sqrt(np.mean((np.abs(y5 - y4) / sc) ** 2)))
        steps += 1
        if steps > max_steps:
            return U, G, filled, FLOW_MAXSTEPS
        if err <= 1.0:
            tau += h_try
            u = y5
            g, g2 = rhs(u)
            if g2 <= stall_floor:
                return U, G, filled, FLOW_STALL
            if clipped and abs(tau - tgt) <= 1e-12 * max(1.0, tgt):
                U[filled] = u
                G[filled] = g
                filled += 1
            fac = 0.9 * err ** -0.2 if err > 0 else 5.0
            h_step = h_try * min(5.0, max(0.2, fac))
        else:
            h_step = h_try * max(0.2, 0.9 * err ** -0.2)
            if h_step < 1e-15 * max(1.0, tau):
                return U, G, filled, FLOW_STEPFAIL
    return U, G, filled, FLOW_OK
