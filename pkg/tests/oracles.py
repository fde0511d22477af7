"""Reference implementations that share no code with the package."""

import math

import numpy as np
from scipy.linalg import expm

SQRT5 = math.sqrt(5)
KAPPA5 = ((3 / SQRT5 + 1) / 2, -(3 / SQRT5 - 1) / 2)


def pair_stiffness(n, kappa, double_sum=False):
    """Stiffness matrix from the list of unordered pairs.

    Each pair {i, j} at cyclic distance d gets coupling kappa_d; with
    ``double_sum`` the opposite pairs (d = n/2) are visited twice.
    """
    K = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = min(j - i, n - (j - i))
            w = float(kappa[d - 1])
            if double_sum and 2 * d == n:
                w *= 2
            K[i, i] += w
            K[j, j] += w
            K[i, j] -= w
            K[j, i] -= w
    return K


def expm_state(n, kappa, r0, p0, t, mass=1.0, omega=1.0):
    """Exact flow via the matrix exponential of the first-order system."""
    K = pair_stiffness(n, kappa)
    Z = np.zeros((n, n))
    A = np.block([[Z, np.eye(n) / mass], [-mass * omega ** 2 * K, Z]])
    x0 = np.vstack([np.asarray(r0, float), np.asarray(p0, float)])
    x = expm(A * t) @ x0
    return x[:n], x[n:]


def lam_n4(k1, k2):
    return (2 * (k1 + k2), 4 * k1)


def lam_n5(k1, k2):
    a = 5 * (k1 + k2)
    b = SQRT5 * (k1 - k2)
    return ((a - b) / 2, (a + b) / 2)


def lam_n6(k1, k2, k3):
    return (k1 + 3 * k2 + 2 * k3, 3 * k1 + 3 * k2, 4 * k1 + 2 * k3)


def dft_W_n5():
    cp, cm = (SQRT5 + 1) / 4, (SQRT5 - 1) / 4
    a, b = math.sqrt(2 / 5), 5 ** -0.25
    sp, sm = math.sqrt(cp), math.sqrt(cm)
    return np.array([
        [1 / SQRT5] * 5,
        [a, a * cm, -a * cp, -a * cp, a * cm],
        [0, sp * b, sm * b, -sm * b, -sp * b],
        [a, -a * cp, a * cm, a * cm, -a * cp],
        [0, sm * b, -sp * b, sp * b, -sm * b],
    ])


def dft_M_n4():
    """Four-body transform with a non-normalized last row, kept as a reference."""
    h, s = 0.5, 1 / math.sqrt(2)
    return np.array([
        [h, h, h, h],
        [0, -s, 0, s],
        [s, 0, -s, 0],
        [-s, s, -s, s],
    ])


def random_com_state(rng, n, scale=1.0):
    r = rng.standard_normal((n, 2)) * scale
    p = rng.standard_normal((n, 2)) * scale
    return r - r.mean(axis=0), p - p.mean(axis=0)


def choreography_state(n, harmonics, omega0, mass=1.0):
    """Initial data of r_j(t) = q(t + j T/n) with q(t) = sum_k c_k exp(i k omega0 t).

    ``harmonics`` maps integer k to a complex amplitude.  The result is a
    genuine solution only when sector |k| mod n oscillates at |k| omega0.
    """
    w = np.exp(2j * np.pi * np.arange(n) / n)
    z = sum(c * w ** k for k, c in harmonics.items())
    v = sum(1j * k * omega0 * c * w ** k for k, c in harmonics.items())
    return np.column_stack([z.real, z.imag]), mass * np.column_stack([v.real, v.imag])
