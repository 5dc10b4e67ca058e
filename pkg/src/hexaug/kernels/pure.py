"""NumPy implementation of the SGD kernel contract."""

import numpy as np


def sgd_epochs(X, y, W, b, lr, l2, batch_size, order, loss_out):
    # Non-finite losses are reported through the return value, so numpy
    # overflow warnings on the way there are suppressed.
    with np.errstate(over="ignore", invalid="ignore"):
        return _sgd_epochs(X, y, W, b, lr, l2, batch_size, order, loss_out)


def _sgd_epochs(X, y, W, b, lr, l2, batch_size, order, loss_out):
    n = X.shape[0]
    step = 0
    for e in range(order.shape[0]):
        perm = order[e]
        epoch_total = 0.0
        for start in range(0, n, batch_size):
            idx = perm[start:start + batch_size]
            Xb = X[idx]
            yb = y[idx]
            m = idx.shape[0]
            rows = np.arange(m)

            logits = Xb @ W.T + b
            logits -= logits.max(axis=1, keepdims=True)
            expz = np.exp(logits)
            z_sum = expz.sum(axis=1)
            ce = np.log(z_sum) - logits[rows, yb]
            loss = ce.mean() + 0.5 * l2 * float(np.square(W).sum())
            if not np.isfinite(loss):
                return step
            epoch_total += loss * m

            grad_coef = expz / z_sum[:, None]
            grad_coef[rows, yb] -= 1.0
            grad_coef /= m
            gW = grad_coef.T @ Xb + l2 * W
            gb = grad_coef.sum(axis=0)
            W -= lr * gW
            b -= lr * gb
            step += 1
        loss_out[e] = epoch_total / n
    return -1
