"""Numba kernels for the sequential inner loops (decision feedback and
sample-by-sample training); everything block-wise stays in numpy."""

import numpy as np
from numba import njit


@njit(cache=True)
def pegasos_train(X, y, lam, perm):
    """Stochastic subgradient descent on the L2-regularized hinge loss.

    The bias rides along as a regularized constant-1 feature: returns a
    vector of length D+1 with the bias last. ``perm`` is the full visit
    order (epochs * n entries); the returned weights are averaged over the
    last half of the steps.
    """
    n, d = X.shape
    w = np.zeros(d + 1)
    w_sum = np.zeros(d + 1)
    t_total = perm.shape[0]
    n_avg = 0
    for t in range(1, t_total + 1):
        i = perm[t - 1]
        eta = 1.0 / (lam * t)
        margin = w[d]
        for j in range(d):
            margin += w[j] * X[i, j]
        margin *= y[i]
        scale = 1.0 - eta * lam
        for j in range(d + 1):
            w[j] *= scale
        if margin < 1.0:
            step = eta * y[i]
            for j in range(d):
                w[j] += step * X[i, j]
            w[d] += step
        if 2 * t >= t_total:
            for j in range(d + 1):
                w_sum[j] += w[j]
            n_avg += 1
    return w_sum / n_avg


@njit(cache=True)
def ordinal_dfe_decide(ff, w_fb, bias, alphabet, genie_amp, use_genie):
    """Sequential ordinal classification with decision feedback.

    ``ff[j, k]`` is the precomputed feedforward dot product of plane j at
    symbol k. The level is the count of planes with strictly positive
    margin (a zero margin counts low). Feedback holds the previous
    decisions mapped to alphabet amplitudes, zero-padded at the start;
    with ``use_genie`` it reads true amplitudes from ``genie_amp`` instead.
    """
    n_planes, n = ff.shape
    n_fb = w_fb.shape[1]
    fb = np.zeros(n_fb)
    levels = np.empty(n, np.int64)
    for k in range(n):
        if use_genie:
            for i in range(n_fb):
                src = k - 1 - i
                fb[i] = genie_amp[src] if src >= 0 else 0.0
        lvl = 0
        for j in range(n_planes):
            mrg = ff[j, k] + bias[j]
            for i in range(n_fb):
                mrg += w_fb[j, i] * fb[i]
            if mrg > 0.0:
                lvl += 1
        levels[k] = lvl
        if not use_genie and n_fb > 0:
            for i in range(n_fb - 1, 0, -1):
                fb[i] = fb[i - 1]
            fb[0] = alphabet[lvl]
    return levels


@njit(cache=True)
def nlms_train(rx, labels_amp, w_ff, w_fb, step, k_start, k_stop, eps):
    """Power-normalized LMS over symbols [k_start, k_stop), teacher-forced.

    The window for symbol k is rx[k-m : k+m+1]; the caller guarantees the
    index range stays inside rx. Weights update in place. Returns the mean
    squared error over the first and last windows for convergence checks.
    """
    n_ff = w_ff.shape[0]
    n_fb = w_fb.shape[0]
    m = (n_ff - 1) // 2
    fb = np.zeros(n_fb)
    n_steps = k_stop - k_start
    w_len = min(200, max(1, n_steps // 4))
    head_sse = 0.0
    tail_sse = 0.0
    cnt = 0
    for k in range(k_start, k_stop):
        base = k - m
        y = 0.0
        for i in range(n_ff):
            y += w_ff[i] * rx[base + i]
        for i in range(n_fb):
            y += w_fb[i] * fb[i]
        e = labels_amp[k] - y
        norm = eps
        for i in range(n_ff):
            norm += rx[base + i] * rx[base + i]
        for i in range(n_fb):
            norm += fb[i] * fb[i]
        g = step * e / norm
        for i in range(n_ff):
            w_ff[i] += g * rx[base + i]
        for i in range(n_fb):
            w_fb[i] += g * fb[i]
        for i in range(n_fb - 1, 0, -1):
            fb[i] = fb[i - 1]
        if n_fb > 0:
            fb[0] = labels_amp[k]
        if cnt < w_len:
            head_sse += e * e
        if cnt >= n_steps - w_len:
            tail_sse += e * e
        cnt += 1
    return head_sse / w_len, tail_sse / w_len


@njit(cache=True)
def slicer_dfe_decide(ff_out, w_fb, alphabet):
    """Slice to the nearest level with decision feedback.

    Thresholds are the level midpoints {-2, 0, +2}; a value exactly on a
    threshold slices to the lower level.
    """
    n = ff_out.shape[0]
    n_fb = w_fb.shape[0]
    fb = np.zeros(n_fb)
    levels = np.empty(n, np.int64)
    for k in range(n):
        y = ff_out[k]
        for i in range(n_fb):
            y += w_fb[i] * fb[i]
        if y <= -2.0:
            lvl = 0
        elif y <= 0.0:
            lvl = 1
        elif y <= 2.0:
            lvl = 2
        else:
            lvl = 3
        levels[k] = lvl
        for i in range(n_fb - 1, 0, -1):
            fb[i] = fb[i - 1]
        if n_fb > 0:
            fb[0] = alphabet[lvl]
    return levels
