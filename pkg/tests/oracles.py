"""Literal loop reimplementations used as brute-force oracles."""

import math


def phi(u):
    return math.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)


def zheng_loop(e, X, h):
    n, p = X.shape
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                k = 1.0
                for m in range(p):
                    k *= phi((X[i, m] - X[j, m]) / h)
                total += e[i] * e[j] * k / h**p
    return total / (n * (n - 1))


def lavergne_loop(e, X, h, dirs):
    n = len(e)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            acc = 0.0
            for a in dirs:
                acc += phi(float(a @ (X[i] - X[j])) / h) / h
            total += e[i] * e[j] * acc / len(dirs)
    return total / (n * (n - 1))


def stute_loop(e, X):
    n = len(e)
    total = 0.0
    for k in range(n):
        R = sum(e[i] for i in range(n) if all(X[i] <= X[k])) / math.sqrt(n)
        total += R * R
    return total / n


def tn_double_loop(e, X):
    n = len(e)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                d = sum((X[i, k] - X[j, k]) ** 2 for k in range(X.shape[1]))
                total += e[i] * e[j] / math.sqrt(d + 1.0)
    return n * total / (n * (n - 1))
