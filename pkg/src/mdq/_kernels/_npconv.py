"""NumPy convolution kernels.

All functions operate on channels-last arrays that have already been
zero-padded by the caller; geometry is always "valid". They are dtype
generic (float32 for training, float64 for gradient verification) and
loop over kernel taps only, delegating the heavy lifting to BLAS.
"""

import numpy as np


def _out_extent(size, k, stride, dilation):
    eff = (k - 1) * dilation + 1
    return (size - eff) // stride + 1


def conv2d_fwd(x, w, stride, dilation):
    b, hp, wp, ci = x.shape
    kh, kw, _, co = w.shape
    ho = _out_extent(hp, kh, stride, dilation)
    wo = _out_extent(wp, kw, stride, dilation)
    out = np.zeros((b, ho, wo, co), dtype=x.dtype)
    for u in range(kh):
        for v in range(kw):
            xs = x[:, u * dilation: u * dilation + (ho - 1) * stride + 1: stride,
                     v * dilation: v * dilation + (wo - 1) * stride + 1: stride, :]
            out += (xs.reshape(-1, ci) @ w[u, v]).reshape(b, ho, wo, co)
    return out


def conv2d_grad_w(x, g, kh, kw, stride, dilation):
    b, ho, wo, co = g.shape
    ci = x.shape[3]
    gw = np.zeros((kh, kw, ci, co), dtype=x.dtype)
    g2 = g.reshape(-1, co)
    for u in range(kh):
        for v in range(kw):
            xs = x[:, u * dilation: u * dilation + (ho - 1) * stride + 1: stride,
                     v * dilation: v * dilation + (wo - 1) * stride + 1: stride, :]
            gw[u, v] = xs.reshape(-1, ci).T @ g2
    return gw


def conv2d_grad_x(g, w, stride, dilation, hp, wp):
    b, ho, wo, co = g.shape
    kh, kw, ci, _ = w.shape
    gx = np.zeros((b, hp, wp, ci), dtype=g.dtype)
    g2 = g.reshape(-1, co)
    for u in range(kh):
        for v in range(kw):
            contrib = (g2 @ w[u, v].T).reshape(b, ho, wo, ci)
            gx[:, u * dilation: u * dilation + (ho - 1) * stride + 1: stride,
                  v * dilation: v * dilation + (wo - 1) * stride + 1: stride, :] += contrib
    return gx


def conv3d_fwd(x, w):
    b, dp, hp, wp, ci = x.shape
    kd, kh, kw, _, co = w.shape
    do, ho, wo = dp - kd + 1, hp - kh + 1, wp - kw + 1
    out = np.zeros((b, do, ho, wo, co), dtype=x.dtype)
    for t in range(kd):
        for u in range(kh):
            for v in range(kw):
                xs = x[:, t:t + do, u:u + ho, v:v + wo, :]
                out += (xs.reshape(-1, ci) @ w[t, u, v]).reshape(b, do, ho, wo, co)
    return out


def conv3d_grad_w(x, g, kd, kh, kw):
    b, do, ho, wo, co = g.shape
    ci = x.shape[4]
    gw = np.zeros((kd, kh, kw, ci, co), dtype=x.dtype)
    g2 = g.reshape(-1, co)
    for t in range(kd):
        for u in range(kh):
            for v in range(kw):
                xs = x[:, t:t + do, u:u + ho, v:v + wo, :]
                gw[t, u, v] = xs.reshape(-1, ci).T @ g2
    return gw


def conv3d_grad_x(g, w, dp, hp, wp):
    b, do, ho, wo, co = g.shape
    kd, kh, kw, ci, _ = w.shape
    gx = np.zeros((b, dp, hp, wp, ci), dtype=g.dtype)
    g2 = g.reshape(-1, co)
    for t in range(kd):
        for u in range(kh):
            for v in range(kw):
                contrib = (g2 @ w[t, u, v].T).reshape(b, do, ho, wo, ci)
                gx[:, t:t + do, u:u + ho, v:v + wo, :] += contrib
    return gx
