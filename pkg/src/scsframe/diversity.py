"""Jaccard dissimilarity and the diversity measures D_min, D_avg and Solow-Polasky."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from . import kernels

DEFAULT_BETA = 2.0e-5
# one-shot evaluations reject matrices whose 1-norm condition exceeds this
COND_LIMIT = 1e14
# the incremental eliminator re-inverts from scratch past this estimate
REFACTOR_COND = 1e10


class DegenerateDiversityError(ValueError):
    pass


@dataclass(frozen=True)
class SolowPolaskyConfig:
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


def _cfg(cfg):
    if cfg is None:
        return SolowPolaskyConfig()
    if isinstance(cfg, SolowPolaskyConfig):
        return cfg
    return SolowPolaskyConfig(float(cfg))


def jaccard_distance(a, b):
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 0.0
    return 1.0 - len(a & b) / union


def element_csr(solutions):
    """Encode element sets as CSR arrays of sorted integer ids."""
    ids = {}
    rows = []
    for sol in solutions:
        row = sorted(ids.setdefault(e, len(ids)) for e in sol)
        rows.append(row)
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(r) for r in rows])
    elems = np.fromiter((e for r in rows for e in r), dtype=np.int64, count=int(ptr[-1]))
    return ptr, elems


def pairwise_matrix(solutions):
    """Symmetric matrix of Jaccard distances between element sets."""
    solutions = list(solutions)
    if not solutions:
        raise ValueError("no solutions")
    ptr, elems = element_csr(solutions)
    return kernels.jaccard_matrix(ptr, elems)


def _subset(matrix, subset):
    matrix = np.asarray(matrix, dtype=float)
    if subset is None:
        idx = np.arange(matrix.shape[0])
    else:
        idx = np.asarray(sorted(subset) if isinstance(subset, (set, frozenset)) else list(subset), dtype=np.int64)
    return matrix, idx


def _offdiag(matrix, subset):
    matrix, idx = _subset(matrix, subset)
    if len(idx) < 2:
        raise ValueError("undefined for fewer than two solutions")
    sub = matrix[np.ix_(idx, idx)]
    iu = np.triu_indices(len(idx), k=1)
    return sub[iu]


def d_min(matrix, subset=None):
    return float(_offdiag(matrix, subset).min())


def d_avg(matrix, subset=None):
    return float(_offdiag(matrix, subset).mean())


def similarity_matrix(matrix, idx, beta):
    return np.exp(-beta * matrix[np.ix_(idx, idx)])


def _check_distinct(matrix, idx):
    if len(idx) < 2:
        return
    sub = matrix[np.ix_(idx, idx)]
    off = sub[~np.eye(len(idx), dtype=bool)]
    if np.any(off <= 0.0):
        raise DegenerateDiversityError(
            "degenerate diversity matrix - deduplicate solutions or increase beta"
        )


def _lu(a):
    lu, piv = lu_factor(a, check_finite=False)
    anorm = np.abs(a).sum(axis=0).max()
    rcond, _ = lapack.dgecon(lu, anorm, norm="1")
    if not rcond > 1.0 / COND_LIMIT:
        raise DegenerateDiversityError(
            "degenerate diversity matrix - deduplicate solutions or increase beta"
        )
    return lu, piv


def solow_polasky(matrix, subset=None, cfg=None):
    """1^T D'^{-1} 1 with D' = exp(-beta * d) restricted to ``subset``."""
    cfg = _cfg(cfg)
    matrix, idx = _subset(matrix, subset)
    if len(idx) == 0:
        return 0.0
    if len(idx) == 1:
        return 1.0
    _check_distinct(matrix, idx)
    a = similarity_matrix(matrix, idx, cfg.beta)
    lu, piv = _lu(a)
    x = lu_solve((lu, piv), np.ones(len(idx)), check_finite=False)
    return float(x.sum())


def _pick(values, best, tol, rng):
    ties = np.flatnonzero(np.abs(values - best) <= tol)
    if rng is None or len(ties) == 1:
        return int(ties[0])
    return int(ties[rng.integers(len(ties))])


class SolowPolaskyEliminator:
    """Explicit inverse of D' over a shrinking index set.

    Removing position i leaves D_SP = S - r_i^2 / M_ii where M is the
    current inverse, S its grand sum and r_i its i-th row sum; the inverse of
    the remaining block is a rank-one downdate of M.
    """

    def __init__(self, matrix, members, cfg=None):
        self.cfg = _cfg(cfg)
        self.matrix = np.asarray(matrix, dtype=float)
        self.members = [int(i) for i in members]
        _check_distinct(self.matrix, np.asarray(self.members, dtype=np.int64))
        self.refactorizations = 0
        self._refactor()

    def _refactor(self):
        idx = np.asarray(self.members, dtype=np.int64)
        if len(idx) == 0:
            self.inv = np.zeros((0, 0))
            return
        a = similarity_matrix(self.matrix, idx, self.cfg.beta)
        lu, piv = _lu(a)
        self.inv = lu_solve((lu, piv), np.eye(len(idx)), check_finite=False)
        self.refactorizations += 1

    def value(self):
        return float(self.inv.sum())

    def removal_values(self):
        """D_SP of the remaining set after removing each member."""
        m = self.inv
        r = m.sum(axis=1)
        return m.sum() - r * r / np.diag(m)

    def remove(self, member):
        i = self.members.index(int(member))
        m = self.inv
        keep = np.r_[0:i, i + 1:len(self.members)]
        col = m[keep, i]
        self.inv = m[np.ix_(keep, keep)] - np.outer(col, m[i, keep]) / m[i, i]
        del self.members[i]
        if len(self.members) > 1:
            idx = np.asarray(self.members, dtype=np.int64)
            a_norm = np.abs(similarity_matrix(self.matrix, idx, self.cfg.beta)).sum(axis=0).max()
            if a_norm * np.abs(self.inv).sum(axis=0).max() > REFACTOR_COND:
                self._refactor()

    def best_removal(self, rng=None):
        vals = self.removal_values()
        best = vals.max()
        tol = 1e-12 * len(vals)
        pos = _pick(vals, best, tol, rng)
        return self.members[pos], float(vals[pos])


def greedy_sp_eliminate(matrix, subset, k, cfg=None, rng=None):
    """Drop members one at a time, each time keeping the largest D_SP, until k remain."""
    members = sorted(subset) if isinstance(subset, (set, frozenset)) else list(subset)
    if k > len(members):
        raise ValueError("k exceeds subset size")
    if k < 0:
        raise ValueError("k must be non-negative")
    elim = SolowPolaskyEliminator(matrix, members, cfg)
    while len(elim.members) > k:
        victim, _ = elim.best_removal(rng)
        elim.remove(victim)
    return set(elim.members)
