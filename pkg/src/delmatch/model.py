"""Random databases, the columnwise deletion channel, and seed batches.

Symbols are unsigned 8-bit indices into a finite alphabet (q <= 256).
All randomness flows through integer seeds split with numpy SeedSequence,
so every generated object is reproducible independent of scheduling.
Indices are 0-based throughout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

PROB_TOL = 1e-12
MAX_ALPHABET = 256
_U64 = 0xFFFFFFFFFFFFFFFF

# Sub-stream ids used when one channel seed feeds several independent draws.
STREAM_DELETION = 0
STREAM_DETECTION = 1
STREAM_LABELING = 2


def derive_seed(master_seed: int, *path: int) -> int:
    """Derive a 64-bit child seed from a master seed and an integer path.

    The split is SeedSequence([master, *path]); children are independent of
    each other and of how many siblings exist, so parallel trials seeded this
    way are reproducible regardless of worker scheduling.
    """
    ss = np.random.SeedSequence([master_seed & _U64, *path])
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & _U64, *path]))


def _frozen(arr: np.ndarray, dtype) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=dtype))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Distribution:
    """A pmf over the symbol alphabet {0, ..., q-1}."""

    probabilities: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if len(probs) < 2:
            raise ValueError("alphabet needs at least 2 symbols")
        if len(probs) > MAX_ALPHABET:
            raise ValueError(f"alphabet limited to {MAX_ALPHABET} symbols")
        if any(p < 0.0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        total = sum(probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")

    @property
    def alphabet_size(self) -> int:
        return len(self.probabilities)

    @classmethod
    def bernoulli(cls, p: float) -> "Distribution":
        """Binary alphabet with P(symbol 1) = p."""
        return cls((1.0 - p, p))

    @classmethod
    def uniform(cls, q: int) -> "Distribution":
        return cls((1.0 / q,) * q)

    def is_uniform(self) -> bool:
        return all(p == self.probabilities[0] for p in self.probabilities)

    def neg_log2(self) -> np.ndarray:
        """Per-symbol -log2 p; +inf at zero-probability symbols."""
        p = np.asarray(self.probabilities, dtype=float)
        out = np.full(p.shape, np.inf)
        nz = p > 0.0
        out[nz] = -np.log2(p[nz])
        return out


@dataclass(frozen=True, eq=False)
class Database:
    """An m x n matrix of symbol indices: rows are users, columns attributes."""

    symbols: np.ndarray
    q: int

    def __post_init__(self):
        arr = np.asarray(self.symbols)
        if arr.ndim != 2:
            raise ValueError("database must be a 2-d matrix")
        if not 2 <= self.q <= MAX_ALPHABET:
            raise ValueError("alphabet size out of range")
        if arr.size and int(arr.max()) >= self.q:
            raise ValueError("symbol index exceeds alphabet size")
        object.__setattr__(self, "symbols", _frozen(arr, np.uint8))

    @property
    def m(self) -> int:
        return self.symbols.shape[0]

    @property
    def n(self) -> int:
        return self.symbols.shape[1]


@dataclass(frozen=True, eq=False)
class DeletionPattern:
    """Length-n bit vector of deleted columns (1 = deleted), shared by all rows."""

    flags: np.ndarray
    delta: float

    def __post_init__(self):
        flags = np.asarray(self.flags)
        if flags.ndim != 1:
            raise ValueError("flags must be a 1-d bit vector")
        if flags.size and not np.isin(flags, (0, 1)).all():
            raise ValueError("flags must be 0/1")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must be in [0, 1)")
        object.__setattr__(self, "flags", _frozen(flags, np.uint8))

    @property
    def n(self) -> int:
        return self.flags.shape[0]

    @property
    def retained_count(self) -> int:
        """K, the number of columns surviving deletion."""
        return int(self.n - self.flags.sum())

    @property
    def deleted_indices(self) -> np.ndarray:
        return np.flatnonzero(self.flags)


@dataclass(frozen=True, eq=False)
class DetectionPattern:
    """One-sided side information: bit 1 marks a column known to be deleted."""

    flags: np.ndarray
    alpha: float

    def __post_init__(self):
        flags = np.asarray(self.flags)
        if flags.ndim != 1:
            raise ValueError("flags must be a 1-d bit vector")
        if flags.size and not np.isin(flags, (0, 1)).all():
            raise ValueError("flags must be 0/1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        object.__setattr__(self, "flags", _frozen(flags, np.uint8))

    @property
    def detected_indices(self) -> np.ndarray:
        return np.flatnonzero(self.flags)

    @property
    def detected_count(self) -> int:
        return int(self.flags.sum())


@dataclass(frozen=True, eq=False)
class Labeling:
    """Bijection sending row i of the source database to row perm[i] of the shuffled one."""

    perm: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm)
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("perm must be a permutation of 0..m-1")
        object.__setattr__(self, "perm", _frozen(perm, np.int64))

    @property
    def m(self) -> int:
        return self.perm.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.m)
        return inv


@dataclass(frozen=True, eq=False)
class DeletionExperiment:
    """Ground truth bundle: source db, shuffled column-deleted db, and the patterns.

    Deleted columns are physically absent from c2; row i of c1 with the deleted
    columns removed equals row labeling.perm[i] of c2, entry for entry.
    """

    c1: Database
    c2: Database
    labeling: Labeling
    deletion: DeletionPattern
    detection: DetectionPattern
    master_seed: int

    def __post_init__(self):
        if self.c2.q != self.c1.q or self.c2.m != self.c1.m:
            raise ValueError("c1/c2 shape or alphabet mismatch")
        if self.deletion.n != self.c1.n or self.detection.flags.shape[0] != self.c1.n:
            raise ValueError("pattern length does not match column count")
        if np.any(self.detection.flags > self.deletion.flags):
            raise ValueError("detection at a column that was not deleted")
        if self.labeling.m != self.c1.m:
            raise ValueError("labeling size mismatch")
        if self.c2.n != self.deletion.retained_count:
            raise ValueError("c2 column count inconsistent with deletion pattern")
        keep = self.deletion.flags == 0
        if not np.array_equal(self.c2.symbols[self.labeling.perm], self.c1.symbols[:, keep]):
            raise ValueError("c2 is not the column-deleted shuffle of c1")

    @property
    def retained_count(self) -> int:
        return self.deletion.retained_count


@dataclass(frozen=True, eq=False)
class SeedBatch:
    """B correctly-matched row pairs, aligned by index.

    Row t of d2 equals row t of d1 with the experiment's deleted columns
    removed.  source_rows optionally records which c1 rows the batch used.
    """

    d1: np.ndarray
    d2: np.ndarray
    source_rows: np.ndarray = None

    def __post_init__(self):
        d1 = _frozen(np.atleast_2d(self.d1), np.uint8)
        d2 = _frozen(np.atleast_2d(self.d2), np.uint8)
        if d1.shape[0] != d2.shape[0]:
            raise ValueError("d1/d2 row counts differ")
        if d2.shape[1] > d1.shape[1]:
            raise ValueError("d2 cannot be wider than d1")
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)
        if self.source_rows is not None:
            object.__setattr__(self, "source_rows", _frozen(self.source_rows, np.int64))

    @property
    def batch_size(self) -> int:
        return self.d1.shape[0]

    @property
    def n(self) -> int:
        return self.d1.shape[1]

    @property
    def retained_count(self) -> int:
        return self.d2.shape[1]


def sample_database(dist: Distribution, m: int, n: int, rng_seed: int) -> Database:
    """Sample an m x n database with i.i.d. entries from dist."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    rng = _rng(rng_seed)
    symbols = rng.choice(dist.alphabet_size, size=(m, n), p=dist.probabilities)
    return Database(symbols.astype(np.uint8), dist.alphabet_size)


def apply_deletion_channel(c1: Database, delta: float, alpha: float,
                           rng_seed: int) -> DeletionExperiment:
    """Delete each column i.i.d. with probability delta, reveal each deleted
    column with probability alpha, and shuffle rows by a uniform permutation.

    The same columns are deleted in every row; retained entries are noise-free.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must be in [0, 1)")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    deleted = (_rng(rng_seed, STREAM_DELETION).random(c1.n) < delta).astype(np.uint8)
    detect_draw = _rng(rng_seed, STREAM_DETECTION).random(c1.n)
    detected = ((deleted == 1) & (detect_draw < alpha)).astype(np.uint8)
    perm = _rng(rng_seed, STREAM_LABELING).permutation(c1.m)

    keep = deleted == 0
    shuffled = np.empty((c1.m, int(keep.sum())), dtype=np.uint8)
    shuffled[perm] = c1.symbols[:, keep]
    return DeletionExperiment(
        c1=c1,
        c2=Database(shuffled, c1.q),
        labeling=Labeling(perm),
        deletion=DeletionPattern(deleted, delta),
        detection=DetectionPattern(detected, alpha),
        master_seed=int(rng_seed),
    )


def extract_seed_batch(exp: DeletionExperiment, batch_size: int,
                       rng_seed: int) -> SeedBatch:
    """Draw batch_size correctly-matched row pairs, without replacement."""
    m = exp.c1.m
    if batch_size > m:
        raise ValueError(f"batch_size {batch_size} exceeds row count {m}")
    idx = _rng(rng_seed).choice(m, size=batch_size, replace=False)
    d1 = exp.c1.symbols[idx]
    d2 = exp.c2.symbols[exp.labeling.perm[idx]]
    return SeedBatch(d1, d2, source_rows=idx)


# ---------------------------------------------------------------------------
# Serialization: CSV databases plus a key-value manifest, enough to reload an
# experiment bit-exactly.

def database_to_csv(db: Database) -> str:
    """First line 'm,n,q', then one comma-separated row of symbol indices per user."""
    lines = [f"{db.m},{db.n},{db.q}"]
    for row in db.symbols:
        lines.append(",".join(str(int(s)) for s in row))
    return "\n".join(lines) + "\n"


def database_from_csv(text: str) -> Database:
    lines = [ln for ln in text.strip().splitlines() if ln]
    m, n, q = (int(x) for x in lines[0].split(","))
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} rows, found {len(lines) - 1}")
    if m and n:
        rows = np.array([[int(x) for x in ln.split(",")] for ln in lines[1:]],
                        dtype=np.uint8)
    else:
        rows = np.zeros((m, n), dtype=np.uint8)
    if rows.shape != (m, n):
        raise ValueError("row length inconsistent with header")
    return Database(rows, q)


def _flags_to_str(flags: np.ndarray) -> str:
    return "".join(str(int(b)) for b in flags)


def save_experiment(exp: DeletionExperiment, directory) -> None:
    """Write c1.csv, c2.csv and experiment.txt under directory."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "c1.csv"), "w") as f:
        f.write(database_to_csv(exp.c1))
    with open(os.path.join(directory, "c2.csv"), "w") as f:
        f.write(database_to_csv(exp.c2))
    manifest = [
        f"master_seed = {exp.master_seed}",
        f"delta = {exp.deletion.delta!r}",
        f"alpha = {exp.detection.alpha!r}",
        "permutation = " + ",".join(str(int(i)) for i in exp.labeling.perm),
        "deletion_flags = " + _flags_to_str(exp.deletion.flags),
        "detection_flags = " + _flags_to_str(exp.detection.flags),
    ]
    with open(os.path.join(directory, "experiment.txt"), "w") as f:
        f.write("\n".join(manifest) + "\n")


def load_experiment(directory) -> DeletionExperiment:
    """Reload an experiment saved by save_experiment; invariants are re-verified."""
    with open(os.path.join(directory, "c1.csv")) as f:
        c1 = database_from_csv(f.read())
    with open(os.path.join(directory, "c2.csv")) as f:
        c2 = database_from_csv(f.read())
    kv = {}
    with open(os.path.join(directory, "experiment.txt")) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            kv[key.strip()] = value.strip()
    perm = np.array([int(x) for x in kv["permutation"].split(",")], dtype=np.int64)
    deletion = np.frombuffer(kv["deletion_flags"].encode(), dtype=np.uint8) - ord("0")
    detection = np.frombuffer(kv["detection_flags"].encode(), dtype=np.uint8) - ord("0")
    return DeletionExperiment(
        c1=c1,
        c2=c2,
        labeling=Labeling(perm),
        deletion=DeletionPattern(deletion, float(kv["delta"])),
        detection=DetectionPattern(detection, float(kv["alpha"])),
        master_seed=int(kv["master_seed"]),
    )
