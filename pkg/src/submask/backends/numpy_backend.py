"""NumPy implementation of the Q-network kernels.

Network shape is fixed at two ReLU hidden layers with a linear output head:
q = W3 relu(W2 relu(W1 x + b1) + b2) + b3, weights stored (out, in).
"""

import numpy as np

NAME = "numpy"


def forward(w1, b1, w2, b2, w3, b3, x):
    """Action values for a single observation, shape (A,)."""
    h1 = np.maximum(w1 @ x + b1, 0.0)
    h2 = np.maximum(w2 @ h1 + b2, 0.0)
    return w3 @ h2 + b3


def forward_batch(w1, b1, w2, b2, w3, b3, xs):
    """Action values for a batch of observations, shape (B, A)."""
    h1 = np.maximum(xs @ w1.T + b1, 0.0)
    h2 = np.maximum(h1 @ w2.T + b2, 0.0)
    return h2 @ w3.T + b3


def train_step(w1, b1, w2, b2, w3, b3, xs, actions, targets, lr):
    """One in-place gradient-descent step on the selected-action MSE loss.

    loss = mean_j (q(x_j)[a_j] - y_j)^2 with y held constant; gradients flow
    only through the chosen output of each sample.  Returns the pre-update
    loss.
    """
    batch = xs.shape[0]
    z1 = xs @ w1.T + b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ w2.T + b2
    h2 = np.maximum(z2, 0.0)
    q = h2 @ w3.T + b3

    rows = np.arange(batch)
    err = q[rows, actions] - targets
    loss = float(np.mean(err ** 2))

    g_out = np.zeros_like(q)
    g_out[rows, actions] = 2.0 * err / batch
    gw3 = g_out.T @ h2
    gb3 = g_out.sum(axis=0)
    g_h2 = (g_out @ w3) * (z2 > 0.0)
    gw2 = g_h2.T @ h1
    gb2 = g_h2.sum(axis=0)
    g_h1 = (g_h2 @ w2) * (z1 > 0.0)
    gw1 = g_h1.T @ xs
    gb1 = g_h1.sum(axis=0)

    w1 -= lr * gw1
    b1 -= lr * gb1
    w2 -= lr * gw2
    b2 -= lr * gb2
    w3 -= lr * gw3
    b3 -= lr * gb3
    return loss
