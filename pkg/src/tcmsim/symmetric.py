"""Permutation-symmetric fast path for the literal multimode observables.

When every mode carries the same distribution, the literal amplitudes
depend on a configuration only through additive per-mode statistics, and
the joint weight is permutation invariant.  Summations over the full
Cartesian product of windows then collapse to sums over occupation
multisets weighted by their permutation multiplicity, which is what makes
mode counts up to six tractable.

Multisets are enumerated level by level as nondecreasing tuples: each level
extends every partial tuple by all values not below its last entry, and all
the statistics, weight products, and multiplicity denominators are carried
along as flat numpy arrays, so no per-configuration Python loop runs.
"""

from __future__ import annotations

import math

import numpy as np

from .closed_form import literal_xs_from_stats
from .errors import ConfigurationError
from .fock_field import FieldDistribution

_STAT_KEYS = ("Sn", "S0", "S1p", "S2p", "T01", "T12", "Tm0", "Sm_re", "n_zeros")

MAX_MULTISETS = 100_000_000


def _per_value_features(field: FieldDistribution) -> dict[str, np.ndarray]:
    lo = max(0, field.window.n_min - 2)
    v = np.arange(lo, field.window.n_max + 1, dtype=float)
    feats = {
        "Sn": v,
        "S0": np.sqrt(v),
        "S1p": np.sqrt(v + 1.0),
        "S2p": np.sqrt(v + 2.0),
        "T01": np.sqrt(v * (v + 1.0)),
        "T12": np.sqrt((v + 1.0) * (v + 2.0)),
        "Tm0": np.sqrt(np.maximum(v - 1.0, 0.0) * v),
        "Sm_re": np.sqrt(np.maximum(v - 1.0, 0.0)),
        "n_zeros": (v == 0).astype(float),
    }
    ns = np.arange(lo, field.window.n_max + 1)
    weights = {
        "prod_c0": field.amplitudes_at(ns),
        "prod_c1": field.amplitudes_at(ns + 1),
        "prod_c2": field.amplitudes_at(ns + 2),
    }
    if all(np.allclose(w.imag, 0.0) for w in weights.values()):
        weights = {k: w.real.copy() for k, w in weights.items()}
    return feats, weights


class _Level:
    """All nondecreasing j-tuples over the value range, as parallel arrays."""

    def __init__(self, stats, weights, last, run, denom):
        self.stats = stats        # dict key -> float array
        self.weights = weights    # dict key -> (possibly real) array
        self.last = last          # index of the largest (= final) value
        self.run = run            # length of the trailing equal-value run
        self.denom = denom        # product of factorials of completed counts
        self.size = last.size


def _first_level(feats, weights, n_values) -> _Level:
    idx = np.arange(n_values)
    return _Level(
        stats={k: feats[k].copy() for k in _STAT_KEYS},
        weights={k: weights[k].copy() for k in weights},
        last=idx,
        run=np.ones(n_values, dtype=np.int32),
        denom=np.ones(n_values),
    )


def _extend_block(level: _Level, prefix: int, iv: int, feats, weights):
    """Extend the first `prefix` rows (those with last <= iv) by value iv."""
    stats = {k: level.stats[k][:prefix] + feats[k][iv] for k in _STAT_KEYS}
    wts = {k: level.weights[k][:prefix] * weights[k][iv] for k in weights}
    same = level.last[:prefix] == iv
    run = np.where(same, level.run[:prefix] + 1, 1).astype(np.int32)
    denom = np.where(same, level.denom[:prefix] * run, level.denom[:prefix])
    last = np.full(prefix, iv, dtype=level.last.dtype)
    return _Level(stats, wts, last, run, denom)


def _concat_levels(blocks: list[_Level]) -> _Level:
    return _Level(
        stats={k: np.concatenate([b.stats[k] for b in blocks]) for k in _STAT_KEYS},
        weights={k: np.concatenate([b.weights[k] for b in blocks])
                 for k in blocks[0].weights},
        last=np.concatenate([b.last for b in blocks]),
        run=np.concatenate([b.run for b in blocks]),
        denom=np.concatenate([b.denom for b in blocks]),
    )


class SymmetricLiteralEvaluator:
    """Unnormalized reduced density matrices (and their traces) of the
    literal multimode amplitude sums, for identical per-mode fields."""

    def __init__(self, field: FieldDistribution, mode_count: int,
                 max_multisets: int = MAX_MULTISETS):
        if mode_count < 2:
            raise ConfigurationError("the symmetric evaluator requires m >= 2")
        self.field = field
        self.mode_count = mode_count
        self.feats, self.wfeats = _per_value_features(field)
        self.n_values = self.feats["Sn"].size
        total = math.comb(self.n_values + mode_count - 1, mode_count)
        if total > max_multisets:
            raise ConfigurationError(
                f"{total} occupation multisets exceed the budget {max_multisets}; "
                "reduce windows, coverage, or mode count")
        self._penultimate = self._build_penultimate()

    def _build_penultimate(self) -> _Level:
        level = _first_level(self.feats, self.wfeats, self.n_values)
        for _ in range(self.mode_count - 2):
            counts = np.searchsorted(level.last, np.arange(self.n_values), side="right")
            blocks = [_extend_block(level, int(counts[iv]), iv, self.feats, self.wfeats)
                      for iv in range(self.n_values) if counts[iv] > 0]
            level = _concat_levels(blocks)
        return level

    def raw_densities(self, gts: np.ndarray) -> np.ndarray:
        """(len(gts), 4, 4) unnormalized density matrices: for every gt the
        multiplicity-weighted sum over multisets of the outer product of the
        branch amplitude vector (x1, -i x3, -i x3, x2)."""
        gts = np.atleast_1d(np.asarray(gts, dtype=float))
        m = self.mode_count
        m_fact = float(math.factorial(m))
        level = self._penultimate
        counts = np.searchsorted(level.last, np.arange(self.n_values), side="right")
        raw = np.zeros((gts.size, 4, 4), dtype=complex)
        for iv in range(self.n_values):
            prefix = int(counts[iv])
            if prefix == 0:
                continue
            block = _extend_block(level, prefix, iv, self.feats, self.wfeats)
            stats = dict(block.stats)
            stats.update({k: np.asarray(w, dtype=complex)
                          for k, w in block.weights.items()})
            mult = m_fact / block.denom
            for gi, gt in enumerate(gts):
                x1, x2, x3 = literal_xs_from_stats(float(gt), m, stats)
                amp = np.stack([x1, -1j * x3, -1j * x3, x2])
                raw[gi] += (mult * amp) @ amp.conj().T
        return raw
