"""Variance-based sensitivity of community vulnerability to its weights.

First-order and total-effect Sobol' indices are estimated per community
with the pick-and-freeze scheme and Jansen's estimators. The weights
(alpha, beta, chi) are independent and uniform on ``[low, high]``.

The two base matrices are the halves of a six-dimensional scrambled
Sobol' point set (``sampler="sobol"``, the default) whose scrambling is
drawn from a Philox stream keyed by ``(seed, matrix id)``. With
``sampler="random"`` each base matrix is read straight off its own Philox
stream, element ``(row, col)`` being draw number ``row * 3 + col``. Either
way every sample is a pure function of the seed and its position, so
results do not depend on how model evaluations are scheduled.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "PARAMETERS",
    "SobolResult",
    "ZetaModel",
    "sobol_indices",
    "worker_count",
]

PARAMETERS = ("alpha", "beta", "chi")
ZERO_VARIANCE = 1e-14
BLOCKS = 32
CHUNK_ROWS = 1024

_MATRIX_A, _MATRIX_B, _MATRIX_BOOT, _MATRIX_SCRAMBLE = 0, 1, 2, 3
SAMPLERS = ("sobol", "random")

Model = Callable[[np.ndarray], np.ndarray]


def worker_count(default: int = 1) -> int:
    """Worker cap from ``COMMVULN_THREADS``, falling back to ``default``."""
    raw = os.environ.get("COMMVULN_THREADS")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"COMMVULN_THREADS must be an integer, got {raw!r}") from None
    return max(1, value)


def _stream(seed: int, matrix: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, matrix])))


def base_matrices(n: int, seed: int, sampler: str = "sobol") -> tuple[np.ndarray, np.ndarray]:
    """Two independent ``(n, 3)`` matrices of unit-cube samples."""
    if sampler == "sobol":
        from scipy.stats import qmc  # slow import; only the Sobol' design needs it

        engine = qmc.Sobol(d=6, scramble=True, seed=_stream(seed, _MATRIX_SCRAMBLE))
        points = engine.random_base2(int(math.log2(n)))
        return points[:, :3], points[:, 3:]
    if sampler == "random":
        return _stream(seed, _MATRIX_A).random((n, 3)), _stream(seed, _MATRIX_B).random((n, 3))
    raise ValueError(f"unknown sampler {sampler!r}; choose from {SAMPLERS}")


class ZetaModel:
    """Vectorized vulnerability of every community as a function of the weights.

    Called with an ``(m, 3)`` array of (alpha, beta, chi) rows, returns an
    ``(m, C)`` array of scores.
    """

    def __init__(self, eta_n: Sequence[float], sigma_n: Sequence[float], gamma_n: Sequence[float]):
        self.factors = np.array([eta_n, sigma_n, gamma_n], dtype=float)  # (3, C)

    @property
    def size(self) -> int:
        return self.factors.shape[1]

    def __call__(self, weights: np.ndarray) -> np.ndarray:
        w = np.asarray(weights, dtype=float)
        with np.errstate(divide="ignore"):
            denom = (
                np.power(self.factors[0][None, :], w[:, 0:1])
                * np.power(self.factors[1][None, :], w[:, 1:2])
                * np.power(self.factors[2][None, :], w[:, 2:3])
            )
            return 1.0 / denom


@dataclass(frozen=True)
class SobolResult:
    """Indices per community (rows) and weight (columns, see PARAMETERS).

    ``first_order`` / ``total_effect`` are clipped to [0, 1]; the ``*_raw``
    arrays keep the unclipped estimates. Standard errors come from a block
    bootstrap; ``gap_se`` is the error of ``first - total``.
    """

    labels: tuple[str, ...]
    first_order: np.ndarray
    total_effect: np.ndarray
    first_order_raw: np.ndarray
    total_effect_raw: np.ndarray
    first_se: np.ndarray
    total_se: np.ndarray
    gap_se: np.ndarray
    variance: np.ndarray
    zero_variance: tuple[bool, ...]
    nonfinite: tuple[bool, ...]
    n: int
    seed: int
    low: float
    high: float
    sampler: str = "sobol"

    @property
    def distribution(self) -> str:
        return f"uniform[{self.low:g},{self.high:g}]^3"

    def index(self, community: int, parameter: str) -> tuple[float, float]:
        j = PARAMETERS.index(parameter)
        return float(self.first_order[community, j]), float(self.total_effect[community, j])

    def rows(self) -> list[dict]:
        out = []
        for k, label in enumerate(self.labels):
            for j, name in enumerate(PARAMETERS):
                out.append(
                    {
                        "community": label,
                        "parameter": name,
                        "first_order": float(self.first_order[k, j]),
                        "total_effect": float(self.total_effect[k, j]),
                        "first_order_raw": float(self.first_order_raw[k, j]),
                        "total_effect_raw": float(self.total_effect_raw[k, j]),
                        "first_se": float(self.first_se[k, j]),
                        "total_se": float(self.total_se[k, j]),
                        "zero_variance": self.zero_variance[k],
                        "nonfinite": self.nonfinite[k],
                        "n": self.n,
                        "seed": self.seed,
                        "range": [self.low, self.high],
                        "sampler": self.sampler,
                    }
                )
        return out


def _evaluate(model: Model, x: np.ndarray, workers: int) -> np.ndarray:
    chunks = [x[i : i + CHUNK_ROWS] for i in range(0, len(x), CHUNK_ROWS)]
    if workers <= 1 or len(chunks) == 1:
        parts = [np.asarray(model(c), dtype=float) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = [np.asarray(p, dtype=float) for p in pool.map(model, chunks)]
    y = np.concatenate(parts, axis=0)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[0] != len(x):
        raise ValueError("model returned the wrong number of rows")
    return y


def _scalar_model(fn: Callable[[float, float, float], Sequence[float]]) -> Model:
    def batch(w: np.ndarray) -> np.ndarray:
        return np.array([fn(*row) for row in w], dtype=float)

    return batch


def _jansen(ya, yb, yab):
    """Point estimates from per-row arrays; ``yab`` is (3, n, C)."""
    var = np.var(np.concatenate([ya, yb]), axis=0)
    total = 0.5 * np.mean((ya[None] - yab) ** 2, axis=1)
    first = var[None] - 0.5 * np.mean((yb[None] - yab) ** 2, axis=1)
    return var, first, total  # (C,), (3, C), (3, C)


def _bootstrap_se(ya, yb, yab, seed: int, replicates: int):
    n = ya.shape[0]
    size = n // BLOCKS

    def block_sums(v):
        return v.reshape(v.shape[:-2] + (BLOCKS, size) + v.shape[-1:]).sum(axis=-2)

    both = np.concatenate([ya, yb], axis=1)  # (n, 2C) keeps per-block pairing
    s1 = block_sums(both)
    s2 = block_sums(both**2)
    sa = block_sums((ya[None] - yab) ** 2)  # (3, BLOCKS, C)
    sb = block_sums((yb[None] - yab) ** 2)

    counts = _stream(seed, _MATRIX_BOOT).multinomial(BLOCKS, [1.0 / BLOCKS] * BLOCKS, size=replicates)
    counts = counts.astype(float)  # (R, BLOCKS)
    rows = n  # each replicate has BLOCKS * size rows per matrix
    c = ya.shape[1]
    m1 = (counts @ s1) / rows  # (R, 2C)
    m2 = (counts @ s2) / rows
    mean = (m1[:, :c] + m1[:, c:]) / 2
    var = (m2[:, :c] + m2[:, c:]) / 2 - mean**2
    ta = np.einsum("rb,pbc->rpc", counts, sa) / rows
    tb = np.einsum("rb,pbc->rpc", counts, sb) / rows
    with np.errstate(divide="ignore", invalid="ignore"):
        total = 0.5 * ta / var[:, None, :]
        first = (var[:, None, :] - 0.5 * tb) / var[:, None, :]
    return (
        np.std(first, axis=0, ddof=1).T,
        np.std(total, axis=0, ddof=1).T,
        np.std(first - total, axis=0, ddof=1).T,
    )


def sobol_indices(
    model: Model | Callable[[float, float, float], Sequence[float]],
    n: int = 4096,
    seed: int = 42,
    low: float = 0.0,
    high: float = 2.0,
    *,
    sampler: str = "sobol",
    vectorized: bool = True,
    labels: Sequence[str] | None = None,
    workers: int | None = None,
    bootstrap: int = 200,
) -> SobolResult:
    """Estimate Sobol' indices of each model output w.r.t. the three weights.

    ``model`` maps an ``(m, 3)`` weight array to ``(m, C)`` outputs; pass
    ``vectorized=False`` for a plain ``fn(alpha, beta, chi) -> scores``.
    ``n`` (a power of two) rows are drawn per base matrix, so the model
    sees ``5 * n`` rows.
    Outputs whose sample variance is below 1e-14 get all-zero indices.
    An output that never changes when a weight is resampled gets exact
    zeros for that weight.
    """
    if n < 64 or n & (n - 1):
        raise ValueError(f"sample count must be a power of two >= 64, got {n}")
    if not low < high:
        raise ValueError(f"empty weight range [{low}, {high}]")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    if not vectorized:
        model = _scalar_model(model)
    workers = worker_count() if workers is None else max(1, workers)

    span = high - low
    unit_a, unit_b = base_matrices(n, seed, sampler)
    a = low + span * unit_a
    b = low + span * unit_b
    hybrids = []
    for j in range(3):
        ab = a.copy()
        ab[:, j] = b[:, j]
        hybrids.append(ab)
    y = _evaluate(model, np.concatenate([a, b, *hybrids]), workers)
    c = y.shape[1]
    ya, yb = y[:n], y[n : 2 * n]
    yab = y[2 * n :].reshape(3, n, c)

    nonfinite = ~np.all(np.isfinite(y), axis=0)
    with np.errstate(invalid="ignore", over="ignore"):
        var, first_num, total_num = _jansen(ya, yb, yab)
        first_se, total_se, gap_se = _bootstrap_se(ya, yb, yab, seed, bootstrap)
    zero_var = (var < ZERO_VARIANCE) & ~nonfinite

    with np.errstate(divide="ignore", invalid="ignore"):
        first_raw = (first_num / var[None]).T  # (C, 3)
        total_raw = (total_num / var[None]).T
    frozen = np.all(ya[None] == yab, axis=1).T  # weight never moved the output
    for arr in (first_raw, total_raw, first_se, total_se, gap_se):
        arr[frozen] = 0.0
    for arr in (first_raw, total_raw, first_se, total_se, gap_se):
        arr[zero_var] = 0.0
        arr[nonfinite] = math.nan

    if labels is None:
        labels = [f"c{k + 1}" for k in range(c)]
    return SobolResult(
        labels=tuple(labels),
        first_order=np.clip(first_raw, 0.0, 1.0),
        total_effect=np.clip(total_raw, 0.0, 1.0),
        first_order_raw=first_raw,
        total_effect_raw=total_raw,
        first_se=first_se,
        total_se=total_se,
        gap_se=gap_se,
        variance=var,
        zero_variance=tuple(bool(v) for v in zero_var),
        nonfinite=tuple(bool(v) for v in nonfinite),
        n=n,
        seed=seed,
        low=low,
        high=high,
        sampler=sampler,
    )
