"""Binary text classifiers for confusion-based change point scoring.

The random forest is grown from scratch on quantile-binned features (Gini
splits, ceil(sqrt(V)) feature subsampling per node, bootstrap rows); the
hot loops are numba-compiled. Multinomial naive Bayes is the fast fallback
backend. Both are deterministic given a seed.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit, prange
from scipy import sparse

_RNG_MULT = np.uint64(0x2545F4914F6CDD1D)
_N_BINS = 32


@njit(cache=True, inline="always")
def _rng_next(state):
    # xorshift64*: deterministic, thread-local, never reseeded from numpy
    state ^= state >> np.uint64(12)
    state ^= state << np.uint64(25)
    state ^= state >> np.uint64(27)
    return state


@njit(cache=True, parallel=True)
def _bin_columns(X, edges):
    n, v = X.shape
    n_edges = edges.shape[0]
    out = np.empty((n, v), np.uint8)
    for j in prange(v):
        for i in range(n):
            x = X[i, j]
            b = 0
            for e in range(n_edges):
                if x > edges[e, j]:
                    b = e + 1
                else:
                    break
            out[i, j] = b
    return out


@njit(cache=True, parallel=True)
def _grow_forest(binned, y, max_depth, k_feats, seeds,
                 feat, thr, left, right, leaf, n_nodes):
    n, v = binned.shape
    n_trees = seeds.shape[0]
    max_nodes = feat.shape[1]
    for t in prange(n_trees):
        state = seeds[t]
        idx = np.empty(n, np.int32)
        for i in range(n):
            state = _rng_next(state)
            idx[i] = np.int32((state * _RNG_MULT) % np.uint64(n))
        perm = np.arange(v).astype(np.int32)
        tmp = np.empty(n, np.int32)
        hist_all = np.empty(_N_BINS, np.int64)
        hist_pos = np.empty(_N_BINS, np.int64)
        # stack of (node, start, end, depth) over idx
        stack_node = np.empty(max_nodes, np.int32)
        stack_lo = np.empty(max_nodes, np.int32)
        stack_hi = np.empty(max_nodes, np.int32)
        stack_depth = np.empty(max_nodes, np.int32)
        top = 0
        stack_node[0] = 0
        stack_lo[0] = 0
        stack_hi[0] = n
        stack_depth[0] = 0
        n_used = 1
        while top >= 0:
            node = stack_node[top]
            lo = stack_lo[top]
            hi = stack_hi[top]
            depth = stack_depth[top]
            top -= 1
            m = hi - lo
            pos = 0
            for i in range(lo, hi):
                pos += y[idx[i]]
            majority = np.uint8(1) if 2 * pos > m else np.uint8(0)
            if pos == 0 or pos == m or depth >= max_depth or m < 2:
                feat[t, node] = -1
                leaf[t, node] = majority
                continue
            # sample k features without replacement (partial Fisher-Yates)
            for j in range(k_feats):
                state = _rng_next(state)
                r = j + np.int64((state * _RNG_MULT) % np.uint64(v - j))
                p = perm[j]
                perm[j] = perm[r]
                perm[r] = p
            parent_score = (pos * pos + (m - pos) * (m - pos)) / m
            best_score = parent_score + 1e-12
            best_f = -1
            best_b = 0
            for j in range(k_feats):
                f = perm[j]
                for b in range(_N_BINS):
                    hist_all[b] = 0
                    hist_pos[b] = 0
                for i in range(lo, hi):
                    b = binned[idx[i], f]
                    hist_all[b] += 1
                    hist_pos[b] += y[idx[i]]
                nl = 0
                pl = 0
                for b in range(_N_BINS - 1):
                    nl += hist_all[b]
                    pl += hist_pos[b]
                    if nl == 0:
                        continue
                    if nl == m:
                        break
                    nr = m - nl
                    pr = pos - pl
                    score = (pl * pl + (nl - pl) * (nl - pl)) / nl \
                        + (pr * pr + (nr - pr) * (nr - pr)) / nr
                    if score > best_score:
                        best_score = score
                        best_f = f
                        best_b = b
            if best_f < 0:
                feat[t, node] = -1
                leaf[t, node] = majority
                continue
            # stable partition: bin <= best_b goes left
            nl = 0
            for i in range(lo, hi):
                if binned[idx[i], best_f] <= best_b:
                    tmp[lo + nl] = idx[i]
                    nl += 1
            nr = 0
            for i in range(lo, hi):
                if binned[idx[i], best_f] > best_b:
                    tmp[lo + nl + nr] = idx[i]
                    nr += 1
            for i in range(lo, hi):
                idx[i] = tmp[i]
            lchild = n_used
            rchild = n_used + 1
            n_used += 2
            feat[t, node] = best_f
            thr[t, node] = np.uint8(best_b)
            left[t, node] = lchild
            right[t, node] = rchild
            top += 1
            stack_node[top] = lchild
            stack_lo[top] = lo
            stack_hi[top] = lo + nl
            stack_depth[top] = depth + 1
            top += 1
            stack_node[top] = rchild
            stack_lo[top] = lo + nl
            stack_hi[top] = hi
            stack_depth[top] = depth + 1
        n_nodes[t] = n_used
    return


@njit(cache=True, parallel=True)
def _forest_votes(binned, feat, thr, left, right, leaf):
    n = binned.shape[0]
    n_trees = feat.shape[0]
    votes = np.zeros(n, np.int64)
    for i in prange(n):
        acc = 0
        for t in range(n_trees):
            node = 0
            while feat[t, node] >= 0:
                if binned[i, feat[t, node]] <= thr[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            if leaf[t, node] == 1:
                acc += 1
        votes[i] = acc
    return votes


def _as_dense(X) -> np.ndarray:
    if sparse.issparse(X):
        return np.asarray(X.todense(), dtype=np.float32)
    return np.asarray(X, dtype=np.float32)


class RandomForest:
    """Bagged Gini decision trees on quantile-binned features."""

    def __init__(self, n_trees: int = 100, max_depth: int = 16, seed: int = 0):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.seed = seed

    def fit(self, X, y) -> "RandomForest":
        X = _as_dense(X)
        y = np.ascontiguousarray(y, dtype=np.uint8)
        n, v = X.shape
        qs = np.linspace(0.0, 1.0, _N_BINS + 1)[1:-1]
        self._edges = np.ascontiguousarray(np.quantile(X, qs, axis=0), dtype=np.float32)
        binned = _bin_columns(X, self._edges)
        k_feats = max(1, math.ceil(math.sqrt(v)))
        seeds = np.random.SeedSequence(self.seed).generate_state(self.n_trees, np.uint64)
        seeds[seeds == 0] = _RNG_MULT
        max_nodes = 2 * n + 1
        self._feat = np.full((self.n_trees, max_nodes), -1, np.int32)
        self._thr = np.zeros((self.n_trees, max_nodes), np.uint8)
        self._left = np.zeros((self.n_trees, max_nodes), np.int32)
        self._right = np.zeros((self.n_trees, max_nodes), np.int32)
        self._leaf = np.zeros((self.n_trees, max_nodes), np.uint8)
        self._n_nodes = np.zeros(self.n_trees, np.int32)
        _grow_forest(binned, y, self.max_depth, k_feats, seeds,
                     self._feat, self._thr, self._left, self._right,
                     self._leaf, self._n_nodes)
        return self

    def predict(self, X) -> np.ndarray:
        binned = _bin_columns(_as_dense(X), self._edges)
        votes = _forest_votes(binned, self._feat, self._thr,
                              self._left, self._right, self._leaf)
        return (2 * votes > self.n_trees).astype(np.uint8)


class MultinomialNaiveBayes:
    """Laplace-smoothed multinomial NB over nonnegative feature weights."""

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha

    def fit(self, X, y) -> "MultinomialNaiveBayes":
        y = np.asarray(y)
        n, v = X.shape
        self._log_theta = np.empty((2, v))
        self._log_prior = np.empty(2)
        for c in (0, 1):
            mask = y == c
            rows = X[np.flatnonzero(mask)] if sparse.issparse(X) else X[mask]
            sums = np.asarray(rows.sum(axis=0)).ravel()
            self._log_theta[c] = np.log(sums + self.alpha) - np.log(sums.sum() + self.alpha * v)
            self._log_prior[c] = math.log(max(mask.sum(), 1) / n)
        return self

    def predict(self, X) -> np.ndarray:
        scores = X @ self._log_theta.T + self._log_prior
        scores = np.asarray(scores)
        return (scores[:, 1] > scores[:, 0]).astype(np.uint8)


def stratified_folds(y, n_folds: int) -> list[np.ndarray]:
    """Deterministic stratified folds: class indices dealt round-robin."""
    y = np.asarray(y)
    folds = [[] for _ in range(n_folds)]
    for c in np.unique(y):
        c_idx = np.flatnonzero(y == c)
        for f in range(n_folds):
            folds[f].extend(c_idx[f::n_folds])
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def cross_val_accuracy(make_classifier, X, y, n_folds: int) -> float:
    """Mean stratified k-fold accuracy; ``make_classifier(fold)`` per fold."""
    y = np.asarray(y)
    folds = stratified_folds(y, n_folds)
    accs = []
    all_idx = np.arange(len(y))
    for f, test_idx in enumerate(folds):
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        train_idx = all_idx[train_mask]
        clf = make_classifier(f)
        clf.fit(X[train_idx], y[train_idx])
        pred = clf.predict(X[test_idx])
        accs.append(float(np.mean(pred == y[test_idx])))
    return float(np.mean(accs))
