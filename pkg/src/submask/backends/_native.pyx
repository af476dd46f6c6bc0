# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the Q-network kernels.

Same contract as numpy_backend: two ReLU hidden layers, linear head,
weights (out, in), float64 throughout.  The gradient step only ever touches
the selected output of each sample, so the backward pass is a handful of
vector updates per sample.
"""

import numpy as np

NAME = "native"


cdef void _affine(const double[:, ::1] w, const double[::1] b,
                  const double[::1] x, double[::1] z) noexcept:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(w.shape[0]):
        acc = b[i]
        for j in range(w.shape[1]):
            acc += w[i, j] * x[j]
        z[i] = acc


cdef void _relu(const double[::1] z, double[::1] h) noexcept:
    cdef Py_ssize_t i
    for i in range(z.shape[0]):
        h[i] = z[i] if z[i] > 0.0 else 0.0


def forward(const double[:, ::1] w1, const double[::1] b1,
            const double[:, ::1] w2, const double[::1] b2,
            const double[:, ::1] w3, const double[::1] b3,
            const double[::1] x):
    """Action values for a single observation, shape (A,)."""
    z1 = np.empty(w1.shape[0])
    h1 = np.empty(w1.shape[0])
    z2 = np.empty(w2.shape[0])
    h2 = np.empty(w2.shape[0])
    out = np.empty(w3.shape[0])
    _affine(w1, b1, x, z1)
    _relu(z1, h1)
    _affine(w2, b2, h1, z2)
    _relu(z2, h2)
    _affine(w3, b3, h2, out)
    return out


def forward_batch(const double[:, ::1] w1, const double[::1] b1,
                  const double[:, ::1] w2, const double[::1] b2,
                  const double[:, ::1] w3, const double[::1] b3,
                  const double[:, ::1] xs):
    """Action values for a batch of observations, shape (B, A)."""
    cdef Py_ssize_t j
    out = np.empty((xs.shape[0], w3.shape[0]))
    z1 = np.empty(w1.shape[0])
    h1 = np.empty(w1.shape[0])
    z2 = np.empty(w2.shape[0])
    h2 = np.empty(w2.shape[0])
    cdef double[:, ::1] out_v = out
    for j in range(xs.shape[0]):
        _affine(w1, b1, xs[j], z1)
        _relu(z1, h1)
        _affine(w2, b2, h1, z2)
        _relu(z2, h2)
        _affine(w3, b3, h2, out_v[j])
    return out


def train_step(double[:, ::1] w1, double[::1] b1,
               double[:, ::1] w2, double[::1] b2,
               double[:, ::1] w3, double[::1] b3,
               const double[:, ::1] xs, const long[::1] actions,
               const double[::1] targets, double lr):
    """One in-place gradient-descent step on the selected-action MSE loss.

    Returns the pre-update loss; targets carry no gradient.
    """
    cdef Py_ssize_t batch = xs.shape[0]
    cdef Py_ssize_t n_in = w1.shape[1]
    cdef Py_ssize_t n_h1 = w1.shape[0]
    cdef Py_ssize_t n_h2 = w2.shape[0]
    cdef Py_ssize_t n_out = w3.shape[0]
    cdef Py_ssize_t i, j, s, a
    cdef double acc, err, coef, loss

    z1 = np.empty(n_h1)
    h1 = np.empty(n_h1)
    z2 = np.empty(n_h2)
    h2 = np.empty(n_h2)
    gz1 = np.empty(n_h1)
    gz2 = np.empty(n_h2)
    gw1 = np.zeros((n_h1, n_in))
    gb1 = np.zeros(n_h1)
    gw2 = np.zeros((n_h2, n_h1))
    gb2 = np.zeros(n_h2)
    gw3 = np.zeros((n_out, n_h2))
    gb3 = np.zeros(n_out)
    cdef double[::1] z1_v = z1, h1_v = h1, z2_v = z2, h2_v = h2
    cdef double[::1] gz1_v = gz1, gz2_v = gz2
    cdef double[:, ::1] gw1_v = gw1, gw2_v = gw2, gw3_v = gw3
    cdef double[::1] gb1_v = gb1, gb2_v = gb2, gb3_v = gb3

    loss = 0.0
    for s in range(batch):
        _affine(w1, b1, xs[s], z1_v)
        _relu(z1_v, h1_v)
        _affine(w2, b2, h1_v, z2_v)
        _relu(z2_v, h2_v)
        a = actions[s]
        acc = b3[a]
        for j in range(n_h2):
            acc += w3[a, j] * h2_v[j]
        err = acc - targets[s]
        loss += err * err
        coef = 2.0 * err / batch

        gb3_v[a] += coef
        for j in range(n_h2):
            gw3_v[a, j] += coef * h2_v[j]
            gz2_v[j] = coef * w3[a, j] if z2_v[j] > 0.0 else 0.0
        for i in range(n_h2):
            if gz2_v[i] != 0.0:
                gb2_v[i] += gz2_v[i]
                for j in range(n_h1):
                    gw2_v[i, j] += gz2_v[i] * h1_v[j]
        for j in range(n_h1):
            acc = 0.0
            for i in range(n_h2):
                acc += gz2_v[i] * w2[i, j]
            gz1_v[j] = acc if z1_v[j] > 0.0 else 0.0
        for i in range(n_h1):
            if gz1_v[i] != 0.0:
                gb1_v[i] += gz1_v[i]
                for j in range(n_in):
                    gw1_v[i, j] += gz1_v[i] * xs[s, j]

    for i in range(n_h1):
        b1[i] -= lr * gb1_v[i]
        for j in range(n_in):
            w1[i, j] -= lr * gw1_v[i, j]
    for i in range(n_h2):
        b2[i] -= lr * gb2_v[i]
        for j in range(n_h1):
            w2[i, j] -= lr * gw2_v[i, j]
    for i in range(n_out):
        b3[i] -= lr * gb3_v[i]
        for j in range(n_h2):
            w3[i, j] -= lr * gw3_v[i, j]
    return loss / batch
