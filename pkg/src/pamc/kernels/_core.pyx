# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled objective/gradient kernel for template instantiation.

Semantically identical to kernels/reference.py (cross-checked by tests) but
exploits slot structure: CNOT factors are row/column permutations and embedded
single-qubit factors touch two rows per column, so nothing here pays for a
dense n^3 product except the one prefix-times-suffix contraction per u3 slot.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

ctypedef double complex cplx


cdef inline void mat_mul(cplx* out, cplx* a, cplx* b, int n) nogil:
    cdef int i, j, l
    cdef cplx acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for l in range(n):
                acc = acc + a[i * n + l] * b[l * n + j]
            out[i * n + j] = acc


cdef inline void apply_u3_left(cplx* out, cplx* inp, cplx m00, cplx m01,
                               cplx m10, cplx m11, int shift, int n) nogil:
    """out = embed(m) @ inp; rows pair up across the target bit."""
    cdef int x, y, j
    cdef int mask = 1 << shift
    cdef cplx lo, hi
    for x in range(n):
        if x & mask:
            continue
        y = x | mask
        for j in range(n):
            lo = inp[x * n + j]
            hi = inp[y * n + j]
            out[x * n + j] = m00 * lo + m01 * hi
            out[y * n + j] = m10 * lo + m11 * hi


cdef inline void apply_cnot_left(cplx* out, cplx* inp, int cb, int tb,
                                 int n) nogil:
    """out = P_cnot @ inp; a pure row shuffle."""
    cdef int x, y, j
    for x in range(n):
        y = x ^ (1 << tb) if (x >> cb) & 1 else x
        for j in range(n):
            out[y * n + j] = inp[x * n + j]


cdef inline void apply_u3_right(cplx* out, cplx* inp, cplx m00, cplx m01,
                                cplx m10, cplx m11, int shift, int n) nogil:
    """out = inp @ embed(m); columns pair up across the target bit."""
    cdef int x, y, i
    cdef int mask = 1 << shift
    cdef cplx lo, hi
    for x in range(n):
        if x & mask:
            continue
        y = x | mask
        for i in range(n):
            lo = inp[i * n + x]
            hi = inp[i * n + y]
            out[i * n + x] = lo * m00 + hi * m10
            out[i * n + y] = lo * m01 + hi * m11


cdef inline void apply_cnot_right(cplx* out, cplx* inp, int cb, int tb,
                                  int n) nogil:
    """out = inp @ P_cnot; a pure column shuffle."""
    cdef int x, y, i
    for x in range(n):
        y = x ^ (1 << tb) if (x >> cb) & 1 else x
        for i in range(n):
            out[i * n + x] = inp[i * n + y]


cdef inline cplx trace_env_embedded(cplx* env, cplx m00, cplx m01, cplx m10,
                                    cplx m11, int shift, int n) nogil:
    """tr(env @ embed(m)) using the two nonzeros per column of embed(m)."""
    cdef int x, clr, st
    cdef int mask = 1 << shift
    cdef cplx acc = 0
    for x in range(n):
        clr = x & ~mask
        st = x | mask
        if x & mask:
            acc = acc + env[x * n + clr] * m01 + env[x * n + st] * m11
        else:
            acc = acc + env[x * n + clr] * m00 + env[x * n + st] * m10
    return acc


def objective_and_grad(slot_kind, slot_a, slot_b, theta, target, int k):
    cdef cnp.ndarray[cnp.int32_t, ndim=1] kind = \
        np.ascontiguousarray(slot_kind, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] sa = \
        np.ascontiguousarray(slot_a, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] sb = \
        np.ascontiguousarray(slot_b, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = \
        np.ascontiguousarray(theta, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tgt = \
        np.ascontiguousarray(target, dtype=np.complex128)

    cdef int m = kind.shape[0]
    cdef int n = 1 << k
    cdef int nn = n * n
    cdef int d = th.shape[0]

    cdef cnp.ndarray[cnp.complex128_t, ndim=1] prefix = \
        np.empty((m + 1) * nn, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] work = \
        np.empty(3 * nn, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad = np.zeros(d, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] offsets = np.full(m, -1, dtype=np.int32)

    cdef cplx* pp = <cplx*> prefix.data
    cdef cplx* pw = <cplx*> work.data
    cdef cplx* ptgt = <cplx*> tgt.data
    cdef double* pg = <double*> grad.data

    cdef cplx* w = pw            # T^dagger times the running suffix product
    cdef cplx* env = pw + nn
    cdef cplx* tmp = pw + 2 * nn

    cdef int s, i, j, off, shift, cb, tb
    cdef cplx a = 0, da
    cdef double amag, scale, cost
    cdef double t_, p_, l_, cc, ss
    cdef cplx el, ep, epl
    cdef cplx u00, u01, u10, u11
    cdef cplx d00, d01, d10, d11

    # prefix products: prefix[0] = I, prefix[s+1] = S_s @ prefix[s]
    for i in range(nn):
        pp[i] = 0
    for i in range(n):
        pp[i * n + i] = 1
    off = 0
    for s in range(m):
        if kind[s] == 0:
            t_ = th[off]; p_ = th[off + 1]; l_ = th[off + 2]
            cc = cos(t_ / 2.0); ss = sin(t_ / 2.0)
            el = cos(l_) + 1j * sin(l_)
            ep = cos(p_) + 1j * sin(p_)
            epl = cos(p_ + l_) + 1j * sin(p_ + l_)
            apply_u3_left(pp + (s + 1) * nn, pp + s * nn,
                          cc, -el * ss, ep * ss, epl * cc, k - 1 - sa[s], n)
            offsets[s] = off
            off += 3
        else:
            apply_cnot_left(pp + (s + 1) * nn, pp + s * nn,
                            k - 1 - sa[s], k - 1 - sb[s], n)

    # a = <T, V>_F = tr(T^dagger V)
    for i in range(nn):
        a = a + ptgt[i].conjugate() * pp[m * nn + i]
    amag = abs(a)
    cost = 1.0 - amag / n
    if amag < 1e-300:
        return cost, grad

    # w = T^dagger
    for i in range(n):
        for j in range(n):
            w[i * n + j] = ptgt[j * n + i].conjugate()

    scale = -1.0 / (n * amag)
    for s in range(m - 1, -1, -1):
        if kind[s] == 0:
            off = offsets[s]
            shift = k - 1 - sa[s]
            t_ = th[off]; p_ = th[off + 1]; l_ = th[off + 2]
            cc = cos(t_ / 2.0); ss = sin(t_ / 2.0)
            el = cos(l_) + 1j * sin(l_)
            ep = cos(p_) + 1j * sin(p_)
            epl = cos(p_ + l_) + 1j * sin(p_ + l_)
            mat_mul(env, pp + s * nn, w, n)
            for j in range(3):
                if j == 0:
                    d00 = -0.5 * ss; d01 = -0.5 * el * cc
                    d10 = 0.5 * ep * cc; d11 = -0.5 * epl * ss
                elif j == 1:
                    d00 = 0; d01 = 0
                    d10 = 1j * ep * ss; d11 = 1j * epl * cc
                else:
                    d00 = 0; d01 = -1j * el * ss
                    d10 = 0; d11 = 1j * epl * cc
                da = trace_env_embedded(env, d00, d01, d10, d11, shift, n)
                pg[off + j] = scale * (a.conjugate() * da).real
            # w <- w @ S_s
            apply_u3_right(tmp, w, cc, -el * ss, ep * ss, epl * cc, shift, n)
        else:
            apply_cnot_right(tmp, w, k - 1 - sa[s], k - 1 - sb[s], n)
        for i in range(nn):
            w[i] = tmp[i]

    return cost, grad
