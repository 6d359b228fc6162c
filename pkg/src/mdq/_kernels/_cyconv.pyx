# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled convolution kernels (float32, channels-last, pre-padded inputs).

Parallelism is data-parallel over output elements: every output element is
written by exactly one thread and its accumulation order is fixed by the
loop nest, so results are bitwise identical for any thread count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()

ctypedef float f32


def conv2d_fwd(object xo, object wo, int stride, int dilation):
    cdef f32[:, :, :, ::1] x = np.ascontiguousarray(xo, dtype=np.float32)
    cdef f32[:, :, :, ::1] w = np.ascontiguousarray(wo, dtype=np.float32)
    cdef Py_ssize_t b = x.shape[0], hp = x.shape[1], wp = x.shape[2], ci = x.shape[3]
    cdef Py_ssize_t kh = w.shape[0], kw = w.shape[1], co = w.shape[3]
    cdef Py_ssize_t eh = (kh - 1) * dilation + 1
    cdef Py_ssize_t ew = (kw - 1) * dilation + 1
    cdef Py_ssize_t ho = (hp - eh) // stride + 1
    cdef Py_ssize_t wo_ = (wp - ew) // stride + 1
    out_arr = np.zeros((b, ho, wo_, co), dtype=np.float32)
    cdef f32[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t r, bi, i, j, u, v, c, k, ii, jj
    cdef f32 xv
    for r in prange(b * ho, nogil=True, schedule='static'):
        bi = r // ho
        i = r % ho
        for j in range(wo_):
            for u in range(kh):
                ii = i * stride + u * dilation
                for v in range(kw):
                    jj = j * stride + v * dilation
                    for c in range(ci):
                        xv = x[bi, ii, jj, c]
                        for k in range(co):
                            out[bi, i, j, k] += xv * w[u, v, c, k]
    return out_arr


def conv2d_grad_w(object xo, object go, int kh, int kw, int stride, int dilation):
    cdef f32[:, :, :, ::1] x = np.ascontiguousarray(xo, dtype=np.float32)
    cdef f32[:, :, :, ::1] g = np.ascontiguousarray(go, dtype=np.float32)
    cdef Py_ssize_t b = g.shape[0], ho = g.shape[1], wo_ = g.shape[2], co = g.shape[3]
    cdef Py_ssize_t ci = x.shape[3]
    gw_arr = np.zeros((kh, kw, ci, co), dtype=np.float32)
    cdef f32[:, :, :, ::1] gw = gw_arr
    cdef Py_ssize_t t, u, v, bi, i, j, c, k, ii, jj
    cdef f32 xv
    for t in prange(kh * kw, nogil=True, schedule='static'):
        u = t // kw
        v = t % kw
        for bi in range(b):
            for i in range(ho):
                ii = i * stride + u * dilation
                for j in range(wo_):
                    jj = j * stride + v * dilation
                    for c in range(ci):
                        xv = x[bi, ii, jj, c]
                        for k in range(co):
                            gw[u, v, c, k] += xv * g[bi, i, j, k]
    return gw_arr


def conv2d_grad_x(object go, object wo, int stride, int dilation, int hp, int wp):
    cdef f32[:, :, :, ::1] g = np.ascontiguousarray(go, dtype=np.float32)
    cdef f32[:, :, :, ::1] w = np.ascontiguousarray(wo, dtype=np.float32)
    cdef Py_ssize_t b = g.shape[0], ho = g.shape[1], wo_ = g.shape[2], co = g.shape[3]
    cdef Py_ssize_t kh = w.shape[0], kw = w.shape[1], ci = w.shape[2]
    gx_arr = np.zeros((b, hp, wp, ci), dtype=np.float32)
    cdef f32[:, :, :, ::1] gx = gx_arr
    cdef Py_ssize_t r, bi, ii, jj, u, v, i, j, c, k, ti, tj
    cdef f32 acc
    for r in prange(b * hp, nogil=True, schedule='static'):
        bi = r // hp
        ii = r % hp
        for u in range(kh):
            ti = ii - u * dilation
            if ti < 0 or ti % stride != 0:
                continue
            i = ti // stride
            if i >= ho:
                continue
            for jj in range(wp):
                for v in range(kw):
                    tj = jj - v * dilation
                    if tj < 0 or tj % stride != 0:
                        continue
                    j = tj // stride
                    if j >= wo_:
                        continue
                    for c in range(ci):
                        acc = 0.0
                        for k in range(co):
                            acc = acc + g[bi, i, j, k] * w[u, v, c, k]
                        gx[bi, ii, jj, c] += acc
    return gx_arr


def conv3d_fwd(object xo, object wo):
    cdef f32[:, :, :, :, ::1] x = np.ascontiguousarray(xo, dtype=np.float32)
    cdef f32[:, :, :, :, ::1] w = np.ascontiguousarray(wo, dtype=np.float32)
    cdef Py_ssize_t b = x.shape[0], dp = x.shape[1], hp = x.shape[2], wp = x.shape[3], ci = x.shape[4]
    cdef Py_ssize_t kd = w.shape[0], kh = w.shape[1], kw = w.shape[2], co = w.shape[4]
    cdef Py_ssize_t do_ = dp - kd + 1, ho = hp - kh + 1, wo_ = wp - kw + 1
    out_arr = np.zeros((b, do_, ho, wo_, co), dtype=np.float32)
    cdef f32[:, :, :, :, ::1] out = out_arr
    cdef Py_ssize_t r, bi, d, i, j, t, u, v, c, k
    cdef f32 xv
    for r in prange(b * do_, nogil=True, schedule='static'):
        bi = r // do_
        d = r % do_
        for i in range(ho):
            for j in range(wo_):
                for t in range(kd):
                    for u in range(kh):
                        for v in range(kw):
                            for c in range(ci):
                                xv = x[bi, d + t, i + u, j + v, c]
                                for k in range(co):
                                    out[bi, d, i, j, k] += xv * w[t, u, v, c, k]
    return out_arr


def conv3d_grad_w(object xo, object go, int kd, int kh, int kw):
    cdef f32[:, :, :, :, ::1] x = np.ascontiguousarray(xo, dtype=np.float32)
    cdef f32[:, :, :, :, ::1] g = np.ascontiguousarray(go, dtype=np.float32)
    cdef Py_ssize_t b = g.shape[0], do_ = g.shape[1], ho = g.shape[2], wo_ = g.shape[3], co = g.shape[4]
    cdef Py_ssize_t ci = x.shape[4]
    gw_arr = np.zeros((kd, kh, kw, ci, co), dtype=np.float32)
    cdef f32[:, :, :, :, ::1] gw = gw_arr
    cdef Py_ssize_t q, t, u, v, bi, d, i, j, c, k
    cdef f32 xv
    for q in prange(kd * kh * kw, nogil=True, schedule='static'):
        t = q // (kh * kw)
        u = (q // kw) % kh
        v = q % kw
        for bi in range(b):
            for d in range(do_):
                for i in range(ho):
                    for j in range(wo_):
                        for c in range(ci):
                            xv = x[bi, d + t, i + u, j + v, c]
                            for k in range(co):
                                gw[t, u, v, c, k] += xv * g[bi, d, i, j, k]
    return gw_arr


def conv3d_grad_x(object go, object wo, int dp, int hp, int wp):
    cdef f32[:, :, :, :, ::1] g = np.ascontiguousarray(go, dtype=np.float32)
    cdef f32[:, :, :, :, ::1] w = np.ascontiguousarray(wo, dtype=np.float32)
    cdef Py_ssize_t b = g.shape[0], do_ = g.shape[1], ho = g.shape[2], wo_ = g.shape[3], co = g.shape[4]
    cdef Py_ssize_t kd = w.shape[0], kh = w.shape[1], kw = w.shape[2], ci = w.shape[3]
    gx_arr = np.zeros((b, dp, hp, wp, ci), dtype=np.float32)
    cdef f32[:, :, :, :, ::1] gx = gx_arr
    cdef Py_ssize_t r, bi, dd, ii, jj, t, u, v, d, i, j, c, k
    cdef f32 acc
    for r in prange(b * dp, nogil=True, schedule='static'):
        bi = r // dp
        dd = r % dp
        for t in range(kd):
            d = dd - t
            if d < 0 or d >= do_:
                continue
            for ii in range(hp):
                for u in range(kh):
                    i = ii - u
                    if i < 0 or i >= ho:
                        continue
                    for jj in range(wp):
                        for v in range(kw):
                            j = jj - v
                            if j < 0 or j >= wo_:
                                continue
                            for c in range(ci):
                                acc = 0.0
                                for k in range(co):
                                    acc = acc + g[bi, d, i, j, k] * w[t, u, v, c, k]
                                gx[bi, ii, jj, c] += acc
    return gx_arr
