# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend. Mirrors the contracts of ``_ref``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log1p, floor, INFINITY

cnp.import_array()

LOG_RATE_CLAMP = 30.0
cdef double _CLAMP = 30.0


def backend_name():
    return "compiled"


cdef inline double _softplus(double x) nogil:
    if x > 0.0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef inline double _sigmoid(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


def binary_loss(cnp.ndarray scores, cnp.ndarray marks, double weight):
    cdef double[::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(marks, dtype=np.float64)
    cdef Py_ssize_t T = s.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad = np.empty(T, dtype=np.float64)
    cdef double value = 0.0
    cdef double p
    cdef Py_ssize_t k
    for k in range(T):
        value += weight * y[k] * _softplus(-s[k]) + (1.0 - y[k]) * _softplus(s[k])
        p = _sigmoid(s[k])
        grad[k] = weight * y[k] * (p - 1.0) + (1.0 - y[k]) * p
    return value, grad


def poisson_nll(cnp.ndarray scores, cnp.ndarray multiplicities, long n):
    cdef double[::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef double[::1] m = np.ascontiguousarray(multiplicities, dtype=np.float64)
    cdef Py_ssize_t T = s.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad = np.empty(T, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lam = np.empty(T, dtype=np.float64)
    cdef double total = 0.0
    cdef double event_term = 0.0
    cdef double sk
    cdef Py_ssize_t k
    for k in range(T):
        sk = s[k]
        if sk > _CLAMP:
            sk = _CLAMP
        elif sk < -_CLAMP:
            sk = -_CLAMP
        lam[k] = exp(sk)
        total += lam[k]
        event_term += m[k] * sk
    cdef double value = -event_term + n * log(total)
    for k in range(T):
        grad[k] = -m[k] + n * lam[k] / total
    return value, grad


def cumulative_eval(cnp.ndarray knots, cnp.ndarray rates, cnp.ndarray ts):
    cdef double[::1] H = np.ascontiguousarray(knots, dtype=np.float64)
    cdef double[::1] lam = np.ascontiguousarray(rates, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t T = lam.shape[0]
    cdef Py_ssize_t M = t.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(M, dtype=np.float64)
    cdef Py_ssize_t q, j
    for q in range(M):
        j = <Py_ssize_t>floor(t[q])
        if j < 0:
            j = 0
        elif j > T - 1:
            j = T - 1
        out[q] = H[j] + (t[q] - j) * lam[j]
    return out


def cumulative_invert(cnp.ndarray knots, cnp.ndarray rates, cnp.ndarray zs):
    cdef double[::1] H = np.ascontiguousarray(knots, dtype=np.float64)
    cdef double[::1] lam = np.ascontiguousarray(rates, dtype=np.float64)
    cdef double[::1] z = np.ascontiguousarray(zs, dtype=np.float64)
    cdef Py_ssize_t T = lam.shape[0]
    cdef Py_ssize_t M = z.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(M, dtype=np.float64)
    cdef Py_ssize_t q, lo, hi, mid, j
    for q in range(M):
        if z[q] == H[T]:
            out[q] = <double>T
            continue
        # upper_bound(H, z) - 1, clamped to a valid segment
        lo = 0
        hi = T + 1
        while lo < hi:
            mid = (lo + hi) // 2
            if H[mid] <= z[q]:
                lo = mid + 1
            else:
                hi = mid
        j = lo - 1
        if j < 0:
            j = 0
        elif j > T - 1:
            j = T - 1
        out[q] = j + (z[q] - H[j]) / lam[j]
    return out


cdef inline double _beta_part(double L, double total, long n, long i) nogil:
    # order-statistic factor at cumulative mass L; 0 * log 0 := 0
    cdef double v = 0.0
    cdef double resid
    if i > 1:
        if L <= 0.0:
            return -INFINITY
        v = (i - 1) * log(L)
    if i < n:
        resid = total - L
        if resid <= 0.0:
            return -INFINITY
        v += (n - i) * log(resid)
    return v


def mode_search(cnp.ndarray rates, cnp.ndarray knots, long n, long i):
    cdef double[::1] lam = np.ascontiguousarray(rates, dtype=np.float64)
    cdef double[::1] H = np.ascontiguousarray(knots, dtype=np.float64)
    cdef Py_ssize_t T = lam.shape[0]
    cdef Py_ssize_t j, jbest
    cdef double best_val, best_t, v, t_star, target, log_rate, total

    if n == 1:
        jbest = 0
        for j in range(1, T):
            if lam[j] > lam[jbest]:
                jbest = j
        return <double>jbest + 0.5

    total = H[T]
    target = total * (i - 1) / <double>(n - 1) if 1 < i < n else 0.0
    # the order-statistic factor at each knot is shared by both frames
    # meeting there; evaluate it once
    cdef cnp.ndarray[cnp.float64_t, ndim=1] kb_arr = np.empty(T + 1,
                                                              dtype=np.float64)
    cdef double[::1] kb = kb_arr
    for j in range(T + 1):
        kb[j] = _beta_part(H[j], total, n, i)

    best_val = -INFINITY
    best_t = 0.0
    for j in range(T):
        log_rate = log(lam[j])
        v = kb[j] + log_rate
        if v > best_val:
            best_val = v
            best_t = <double>j
        if 1 < i < n and H[j] <= target <= H[j + 1]:
            t_star = j + (target - H[j]) / lam[j]
            v = _beta_part(target, total, n, i) + log_rate
            if v > best_val:
                best_val = v
                best_t = t_star
        v = kb[j + 1] + log_rate
        if v > best_val:
            best_val = v
            best_t = <double>(j + 1)
    return best_t
