"""Deterministic sampling of instance elements.

Streams are numpy ``Generator`` objects over the PCG64 bit generator.  Each
stream is seeded with ``SeedSequence(seed, spawn_key=(crc32(label),))`` so
that every check draws from its own reproducible stream and the order in
which checks run never changes what they see.  Coordinates are uniform
integers in ``[-box, box]``.
"""
from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass

import numpy as np

from .core import Descriptor, Elem
from .errors import StructuralError

DEFAULT_SEED = 0
DEFAULT_BOX = 16
DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = DEFAULT_SEED
    box: int = DEFAULT_BOX
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise StructuralError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0 < self.box < 2**62:
            raise StructuralError(f"box bound must be in [1, 2^62), got {self.box}")
        if self.samples <= 0:
            raise StructuralError(f"sample count must be positive, got {self.samples}")

    def with_samples(self, samples: int) -> "SamplerConfig":
        return SamplerConfig(self.seed, self.box, samples)

    def with_box(self, box: int) -> "SamplerConfig":
        return SamplerConfig(self.seed, box, self.samples)

    def stream(self, label: str) -> np.random.Generator:
        key = zlib.crc32(label.encode("utf-8"))
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(key,))))


DEFAULT_SAMPLER = SamplerConfig()


def draw_coords(rng: np.random.Generator, dim: int, count: int, box: int) -> list[tuple]:
    if dim == 0:
        return [()] * count
    rows = rng.integers(-box, box, size=(count, dim), endpoint=True).tolist()
    return [tuple(r) for r in rows]


def draw_tuples(rng, dim: int, count: int, arity: int, box: int) -> list[tuple]:
    """``count`` tuples of ``arity`` coordinate vectors each."""
    if dim == 0:
        return [((),) * arity] * count
    block = rng.integers(-box, box, size=(count, arity, dim), endpoint=True).tolist()
    return [tuple(map(tuple, row)) for row in block]


def draw_elements(rng, d: Descriptor, count: int, box: int) -> list[Elem]:
    return [Elem(d, c) for c in draw_coords(rng, d.dimension, count, box)]


def pick(rng, pool: list, count: int) -> list:
    """Uniform draws with replacement from a non-empty pool."""
    idx = rng.integers(0, len(pool), size=count).tolist()
    return [pool[i] for i in idx]


def small_corpus(dim: int, radius: int = 1, limit: int = 729) -> list[tuple]:
    """Every coordinate vector with entries in ``[-radius, radius]``, or [] if too many."""
    if (2 * radius + 1) ** dim > limit:
        return []
    values = sorted(range(-radius, radius + 1), key=_coord_key)
    return [tuple(c) for c in itertools.product(values, repeat=dim)]


def _coord_key(c: int):
    return (abs(c), c < 0)


def witness_key(values) -> tuple:
    """Order witnesses so the smallest, most positive counterexample comes first.

    ``values`` is a nested sequence of coordinate tuples; it is flattened and
    compared by max-norm, then by how many coordinates are negative, then by
    L1-norm, then coordinate by coordinate with ``0 < 1 < -1 < 2 < -2 ...``.
    """
    flat = [c for v in values for c in v]
    if not flat:
        return (0, 0, 0, ())
    return (
        max(abs(c) for c in flat),
        sum(c < 0 for c in flat),
        sum(abs(c) for c in flat),
        tuple(_coord_key(c) for c in flat),
    )


def _key_columns(block: np.ndarray) -> list:
    """Sort keys for one witness group, most significant first."""
    a = np.abs(block)
    cols = [a.max(axis=1, initial=0), (block < 0).sum(axis=1), a.sum(axis=1)]
    for j in range(block.shape[1]):
        cols += [a[:, j], block[:, j] < 0]
    return cols


def rank_rows(groups) -> np.ndarray:
    """Indices that sort rows by ``tuple(witness_key(group) for group in groups)``.

    ``groups`` is a list of lists of ``(count, dim)`` arrays; each inner list is
    flattened row-wise into one witness.
    """
    blocks = [np.concatenate([np.asarray(a).reshape(len(a), -1) for a in g], axis=1) for g in groups]
    n = len(blocks[0]) if blocks else 0
    if any(b.dtype == object for b in blocks):
        keys = [tuple(witness_key([tuple(b[i])]) for b in blocks) for i in range(n)]
        return np.array(sorted(range(n), key=keys.__getitem__), dtype=np.int64)
    cols = [c for b in blocks for c in _key_columns(b)]
    if not cols:
        return np.arange(n)
    return np.lexsort(cols[::-1])
