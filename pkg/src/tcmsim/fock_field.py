"""Initial photon-number distributions and multimode Fock configurations.

A mode's initial state is a vector of complex amplitudes c_n over a
contiguous truncation window of photon numbers.  Coherent states use the
real-phase Poissonian convention c_n = exp(-mean/2) mean^(n/2) / sqrt(n!);
Fock and custom distributions are normalized exactly.  Multimode
configurations are plain tuples of per-mode occupation numbers.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError

DEFAULT_SIGMA_WIDTH = 6.0
DEFAULT_COVERAGE_EPSILON = 1e-12

# custom distributions are renormalized; deviations beyond this warn
NORM_WARN_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TruncationWindow:
    """Contiguous inclusive range [n_min, n_max] of photon numbers."""

    n_min: int
    n_max: int

    def __post_init__(self):
        if self.n_min < 0 or self.n_max < 0:
            raise ConfigurationError("window bounds must be nonnegative")
        if self.n_min > self.n_max:
            raise ConfigurationError(
                f"empty window: n_min={self.n_min} > n_max={self.n_max}")

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    def values(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def contains(self, n: int) -> bool:
        return self.n_min <= n <= self.n_max


def _poisson_pmf(mean: float, ns: np.ndarray) -> np.ndarray:
    if mean == 0.0:
        return np.where(ns == 0, 1.0, 0.0)
    log_p = -mean + ns * np.log(mean) - gammaln(ns + 1.0)
    return np.exp(log_p)


def coherent_amplitudes(mean: float, window: TruncationWindow) -> np.ndarray:
    """Poissonian amplitudes c_n = exp(-mean/2) mean^(n/2)/sqrt(n!) on the window.

    Real phase convention: all values are real and nonnegative.
    """
    if mean < 0:
        raise ConfigurationError(f"coherent mean must be nonnegative, got {mean}")
    ns = window.values()
    if mean == 0.0:
        return np.where(ns == 0, 1.0, 0.0).astype(complex)
    log_c = -mean / 2.0 + 0.5 * ns * np.log(mean) - 0.5 * gammaln(ns + 1.0)
    return np.exp(log_c).astype(complex)


def default_window(mean: float,
                   sigma_width: float = DEFAULT_SIGMA_WIDTH,
                   coverage_epsilon: float = DEFAULT_COVERAGE_EPSILON) -> TruncationWindow:
    """Window mean +- sigma_width*sqrt(mean), widened until the Poisson
    probability captured is at least 1 - coverage_epsilon."""
    if mean < 0:
        raise ConfigurationError(f"mean must be nonnegative, got {mean}")
    if sigma_width <= 0 or coverage_epsilon <= 0:
        raise ConfigurationError("sigma_width and coverage_epsilon must be positive")
    spread = sigma_width * np.sqrt(mean)
    lo = max(0, int(np.floor(mean - spread)))
    hi = max(lo, int(np.ceil(mean + spread)))
    target = 1.0 - coverage_epsilon
    while True:
        ns = np.arange(lo, hi + 1)
        if _poisson_pmf(mean, ns).sum() >= target:
            return TruncationWindow(lo, hi)
        # widen toward the heavier tail first
        p_lo = _poisson_pmf(mean, np.array([lo - 1]))[0] if lo > 0 else -1.0
        p_hi = _poisson_pmf(mean, np.array([hi + 1]))[0]
        if p_lo > p_hi:
            lo -= 1
        else:
            hi += 1


@dataclass(frozen=True, eq=False)
class FieldDistribution:
    """Per-mode initial amplitudes c_n over a truncation window.

    kind is one of "coherent", "fock", "custom".  For coherent fields the
    truncated norm may fall short of 1 by at most coverage_epsilon; fock
    and custom fields are exactly normalized.
    """

    kind: str
    window: TruncationWindow
    amplitudes: np.ndarray
    mean: float = 0.0
    coverage_epsilon: float = DEFAULT_COVERAGE_EPSILON

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.window.size,):
            raise ConfigurationError(
                f"amplitude vector length {amps.shape} does not match window size "
                f"{self.window.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        norm = self.norm_squared()
        # rounding slack on top of the configured coverage budget
        if norm < 1.0 - self.coverage_epsilon - 1e-14 or norm > 1.0 + 1e-14:
            raise ConfigurationError(
                f"window coverage {norm:.17g} outside [1 - {self.coverage_epsilon:g}, 1]; "
                "widen the window or relax coverage_epsilon")

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, n: int) -> complex:
        """c_n for n inside the window; IndexError outside."""
        if not self.window.contains(n):
            raise IndexError(f"photon number {n} outside window "
                             f"[{self.window.n_min}, {self.window.n_max}]")
        return complex(self.amplitudes[n - self.window.n_min])

    def amplitude_or_zero(self, n: int) -> complex:
        return self.amplitude(n) if self.window.contains(n) else 0.0

    def amplitudes_at(self, ns: np.ndarray) -> np.ndarray:
        """Vectorized c_n lookup with zero fill outside the window."""
        ns = np.asarray(ns)
        idx = ns - self.window.n_min
        inside = (idx >= 0) & (idx < self.window.size)
        out = np.zeros(ns.shape, dtype=complex)
        out[inside] = self.amplitudes[idx[inside]]
        return out

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def coherent_field(mean: float,
                   sigma_width: float = DEFAULT_SIGMA_WIDTH,
                   coverage_epsilon: float = DEFAULT_COVERAGE_EPSILON,
                   window: TruncationWindow | None = None) -> FieldDistribution:
    if window is None:
        window = default_window(mean, sigma_width, coverage_epsilon)
    amps = coherent_amplitudes(mean, window)
    return FieldDistribution("coherent", window, amps, mean=mean,
                             coverage_epsilon=coverage_epsilon)


def fock_field(n0: int) -> FieldDistribution:
    if n0 < 0 or int(n0) != n0:
        raise ConfigurationError(f"fock occupation must be a nonnegative integer, got {n0}")
    n0 = int(n0)
    return FieldDistribution("fock", TruncationWindow(n0, n0),
                             np.array([1.0 + 0.0j]), mean=float(n0),
                             coverage_epsilon=0.0)


def custom_field(amplitudes) -> FieldDistribution:
    """Custom distribution starting at n=0, normalized on load."""
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.ndim != 1 or amps.size == 0:
        raise ConfigurationError("custom amplitudes must be a nonempty 1-D vector")
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    if norm == 0.0:
        raise ConfigurationError("custom amplitudes have zero norm")
    if abs(norm - 1.0) > NORM_WARN_TOLERANCE:
        warnings.warn(f"custom distribution norm {norm:.9g} != 1; renormalizing",
                      stacklevel=2)
    amps = amps / norm
    mean = float(np.sum(np.arange(amps.size) * np.abs(amps) ** 2))
    return FieldDistribution("custom", TruncationWindow(0, amps.size - 1),
                             amps, mean=mean, coverage_epsilon=0.0)


def load_custom_field(path) -> FieldDistribution:
    """Read a custom distribution file: one line per photon number starting
    at n=0, each line ``re [im]`` (imaginary part optional)."""
    values = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) > 2:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 're [im]', got {line!r}")
            try:
                re = float(parts[0])
                im = float(parts[1]) if len(parts) == 2 else 0.0
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
            values.append(complex(re, im))
    if not values:
        raise ConfigurationError(f"{path}: no amplitudes found")
    return custom_field(values)


def enumerate_configs(windows: list[TruncationWindow]) -> list[tuple[int, ...]]:
    """Lexicographic Cartesian product of the per-mode windows."""
    if not windows:
        raise ConfigurationError("at least one mode window is required")
    ranges = [range(w.n_min, w.n_max + 1) for w in windows]
    return list(itertools.product(*ranges))


def config_array(windows: list[TruncationWindow]) -> np.ndarray:
    """enumerate_configs as an (N, m) integer array, same ordering."""
    if not windows:
        raise ConfigurationError("at least one mode window is required")
    axes = [w.values() for w in windows]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def joint_weight(config: tuple[int, ...], fields: list[FieldDistribution]) -> complex:
    """Product of the per-mode amplitudes c_{n_k}(0) for one configuration."""
    if len(config) != len(fields):
        raise ConfigurationError(
            f"configuration has {len(config)} modes but {len(fields)} fields given")
    out = 1.0 + 0.0j
    for n, f in zip(config, fields):
        out *= f.amplitude(n)
    return out


def same_fields(fields: list[FieldDistribution]) -> bool:
    """True when every mode carries an identical distribution (enables the
    permutation-symmetric fast paths)."""
    first = fields[0]
    for f in fields[1:]:
        if f.kind != first.kind or f.window != first.window:
            return False
        if not np.array_equal(f.amplitudes, first.amplitudes):
            return False
    return True
