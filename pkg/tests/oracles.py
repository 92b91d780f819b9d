"""Independent brute-force oracles used by the tests.

These deliberately avoid the library's computation paths: alpha enumerates
within-unit pairs with plain loops, OLS solves the normal equations
directly, the KS statistic walks every pooled point, and the KS p-value
sums the Kolmogorov series term by term.
"""

from __future__ import annotations

import math

import numpy as np


def alpha_bruteforce(rows: list[list]) -> float:
    """Nominal Krippendorff alpha by enumerating all within-unit ordered
    pairs (observed) and all pooled ordered pairs (expected)."""
    usable = []
    for row in rows:
        vals = [v for v in row if v is not None]
        if len(vals) >= 2:
            usable.append(vals)
    if not usable:
        raise ValueError("no pairable unit")

    n = sum(len(vals) for vals in usable)
    d_observed = 0.0
    for vals in usable:
        m = len(vals)
        disagree = 0
        for i in range(m):
            for j in range(m):
                if i != j and vals[i] != vals[j]:
                    disagree += 1
        d_observed += disagree / (m - 1)
    d_observed /= n

    pooled = [v for vals in usable for v in vals]
    disagree = 0
    for i in range(n):
        for j in range(n):
            if i != j and pooled[i] != pooled[j]:
                disagree += 1
    if disagree == 0:
        return 1.0
    d_expected = disagree / (n * (n - 1))
    return 1.0 - d_observed / d_expected


def ols_normal_equations(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.solve(X.T @ X, X.T @ y)


def cluster_sandwich_se(X: np.ndarray, y: np.ndarray, clusters: list) -> np.ndarray:
    """Cluster-robust SEs straight from the sandwich formula with the
    G/(G-1) * (n-1)/(n-k) correction."""
    n, k = X.shape
    beta = ols_normal_equations(X, y)
    e = y - X @ beta
    bread = np.linalg.inv(X.T @ X)
    labels = sorted(set(clusters))
    g = len(labels)
    meat = np.zeros((k, k))
    for label in labels:
        idx = [i for i, c in enumerate(clusters) if c == label]
        s = X[idx, :].T @ e[idx]
        meat += np.outer(s, s)
    c = (g / (g - 1)) * ((n - 1) / (n - k))
    return np.sqrt(np.diag(c * bread @ meat @ bread))


def hc1_se(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    n, k = X.shape
    beta = ols_normal_equations(X, y)
    e = y - X @ beta
    bread = np.linalg.inv(X.T @ X)
    meat = np.zeros((k, k))
    for i in range(n):
        meat += e[i] ** 2 * np.outer(X[i], X[i])
    return np.sqrt(np.diag((n / (n - k)) * bread @ meat @ bread))


def plain_se(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    n, k = X.shape
    beta = ols_normal_equations(X, y)
    e = y - X @ beta
    sigma2 = (e @ e) / (n - k)
    return np.sqrt(np.diag(sigma2 * np.linalg.inv(X.T @ X)))


def ks_statistic_bruteforce(a, b) -> float:
    a, b = list(a), list(b)
    best = 0.0
    for x in a + b:
        fa = sum(1 for v in a if v <= x) / len(a)
        fb = sum(1 for v in b if v <= x) / len(b)
        best = max(best, abs(fa - fb))
    return best


def ks_pvalue_series(d: float, n: int, m: int, terms: int = 200) -> float:
    lam = math.sqrt(n * m / (n + m)) * d
    if lam <= 0:
        return 1.0
    total = 0.0
    for k in range(1, terms + 1):
        total += (-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
    return min(max(2.0 * total, 0.0), 1.0)


def spearman_rank_formula(x, y) -> float:
    """Spearman as Pearson over average ranks, computed longhand."""

    def ranks(v):
        order = sorted(range(len(v)), key=lambda i: v[i])
        out = [0.0] * len(v)
        i = 0
        while i < len(v):
            j = i
            while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for t in range(i, j + 1):
                out[order[t]] = avg
            i = j + 1
        return out

    rx, ry = ranks(list(x)), ranks(list(y))
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den
