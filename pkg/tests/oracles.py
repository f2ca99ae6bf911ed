"""Independent reference implementations used only by the tests.

Nothing here calls into the package or into LAPACK eigen/SVD routines.
"""
import math

import numpy as np


def jacobi_eigenvalues(m, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi rotations on a symmetric matrix; eigenvalues descending."""
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        scale = math.sqrt(sum(a[i, i] ** 2 for i in range(n))) or 1.0
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
    else:
        raise RuntimeError("Jacobi oracle did not converge")
    return np.sort(np.diag(a))[::-1]


def gram(a):
    """Plain triple-loop A^T A."""
    a = np.asarray(a, dtype=float)
    d, n = a.shape
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = sum(a[t, i] * a[t, j] for t in range(d))
    return out


def pair_count_auc(scores, truth, positive):
    """Fraction of (positive, negative) pairs ordered correctly, ties count half."""
    pos = [s for s, t in zip(scores, truth) if t == positive]
    neg = [s for s, t in zip(scores, truth) if t != positive]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def nearest_mean(x, mean1, mean2, label1, label2):
    d1 = math.sqrt(sum((a - b) ** 2 for a, b in zip(x, mean1)))
    d2 = math.sqrt(sum((a - b) ** 2 for a, b in zip(x, mean2)))
    return (label2 if d2 < d1 else label1), d1, d2


def normalize_row(row):
    n = len(row)
    mean = sum(row) / n
    std = math.sqrt(sum((v - mean) ** 2 for v in row) / n)
    return [(v - mean) / std for v in row]


def pair_count_auc_np(scores, truth, positive):
    """Broadcast form of :func:`pair_count_auc` for larger inputs."""
    s = np.asarray(scores, dtype=float)
    y = np.array([t == positive for t in truth])
    pos, neg = s[y], s[~y]
    gt = np.count_nonzero(pos[:, None] > neg[None, :])
    eq = np.count_nonzero(pos[:, None] == neg[None, :])
    return (gt + 0.5 * eq) / (pos.size * neg.size)
