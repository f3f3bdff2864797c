"""Pure-numpy objective/gradient kernel for template instantiation.

A template is encoded as parallel slot arrays:
    slot_kind[s]  0 = parameterized single-qubit rotation at wire slot_a[s]
                  1 = CNOT with control slot_a[s], target slot_b[s]
    theta         3 angles per rotation slot, in slot order

The objective is the global-phase-invariant distance
    f(theta) = 1 - |<T, V(theta)>_F| / 2^k
with V the product of slot embeddings (slot 0 applied first, so it sits
rightmost in the product). The gradient is analytic.
"""
from __future__ import annotations

import numpy as np

from ..circuit import embed_1q


def _u3_and_partials(theta: float, phi: float, lam: float):
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    el = np.exp(1j * lam)
    ep = np.exp(1j * phi)
    epl = np.exp(1j * (phi + lam))
    u = np.array([[c, -el * s], [ep * s, epl * c]])
    du_t = 0.5 * np.array([[-s, -el * c], [ep * c, -epl * s]])
    du_p = np.array([[0, 0], [1j * ep * s, 1j * epl * c]])
    du_l = np.array([[0, -1j * el * s], [0, 1j * epl * c]])
    return u, (du_t, du_p, du_l)


def _cnot_embedded(c: int, t: int, k: int) -> np.ndarray:
    n = 2 ** k
    m = np.zeros((n, n), dtype=complex)
    cb = k - 1 - c
    tb = k - 1 - t
    for x in range(n):
        y = x ^ (1 << tb) if (x >> cb) & 1 else x
        m[y, x] = 1.0
    return m


def objective_and_grad(slot_kind, slot_a, slot_b, theta, target, k):
    """Return (cost, grad) for the encoded template against target."""
    n = 2 ** k
    m = len(slot_kind)
    theta = np.asarray(theta, dtype=float)

    mats = []
    partials = {}  # slot index -> (param offset, [3 embedded partial mats])
    off = 0
    for s in range(m):
        if slot_kind[s] == 0:
            u, dus = _u3_and_partials(*theta[off:off + 3])
            mats.append(embed_1q(u, slot_a[s], k))
            partials[s] = (off, [embed_1q(d, slot_a[s], k) for d in dus])
            off += 3
        else:
            mats.append(_cnot_embedded(slot_a[s], slot_b[s], k))

    # prefix[s] = product of the first s slots (slot 0 rightmost)
    prefix = [np.eye(n, dtype=complex)]
    for s in range(m):
        prefix.append(mats[s] @ prefix[s])
    v = prefix[m]

    a = np.vdot(target, v)  # tr(T^dagger V)
    amag = abs(a)
    cost = 1.0 - amag / n

    grad = np.zeros(len(theta))
    if amag < 1e-300:
        return cost, grad

    w = target.conj().T  # T^dagger times the suffix product, built backwards
    scale = -1.0 / (n * amag)
    for s in range(m - 1, -1, -1):
        if s in partials:
            env = prefix[s] @ w
            off, dmats = partials[s]
            for j, dm in enumerate(dmats):
                da = np.trace(env @ dm)
                grad[off + j] = scale * (a.conjugate() * da).real
        w = w @ mats[s]
    return cost, grad
