# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Semantics must match mayektts._ext.pykernels exactly."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def polyphase_resample(const double[::1] x, const double[:, ::1] phases,
                       Py_ssize_t half, Py_ssize_t up, Py_ssize_t down, Py_ssize_t n_out):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t taps = phases.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(n_out, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t m, j, idx, base, p, pos
    cdef double acc
    for m in range(n_out):
        pos = m * down
        base = pos // up
        p = pos - base * up
        acc = 0.0
        for j in range(taps):
            idx = base - half + j
            if 0 <= idx < n:
                acc += phases[p, j] * x[idx]
        out[m] = acc
    return out_arr


def conv1d_same(const double[:, ::1] x, const double[:, :, ::1] w, const double[::1] b):
    cdef Py_ssize_t c_in = x.shape[0], t_len = x.shape[1]
    cdef Py_ssize_t c_out = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t pad = k // 2
    cdef cnp.ndarray[cnp.float64_t, ndim=2] y_arr = np.empty((c_out, t_len), dtype=np.float64)
    cdef double[:, ::1] y = y_arr
    cdef Py_ssize_t o, c, i, t, src, t0, t1
    cdef double wv
    for o in range(c_out):
        for t in range(t_len):
            y[o, t] = b[o]
        for c in range(c_in):
            for i in range(k):
                wv = w[o, c, i]
                # valid t range where 0 <= t + i - pad < t_len
                t0 = pad - i
                if t0 < 0:
                    t0 = 0
                t1 = t_len + pad - i
                if t1 > t_len:
                    t1 = t_len
                for t in range(t0, t1):
                    y[o, t] += wv * x[c, t + i - pad]
    return y_arr


def overlap_add(const double[:, ::1] frames, Py_ssize_t hop, Py_ssize_t out_len):
    cdef Py_ssize_t n_frames = frames.shape[0], width = frames.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(out_len, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t f, j, start
    for f in range(n_frames):
        start = f * hop
        for j in range(width):
            if start + j < out_len:
                out[start + j] += frames[f, j]
    return out_arr
