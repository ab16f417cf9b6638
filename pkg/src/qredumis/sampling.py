"""Kernel samplers and shot post-processing.

Every backend honours the same contract::

    sample(kernel, n_shots, seed, backend, params) -> SampleSet

Shots are raw bitstrings over the kernel vertices; each one that survives
post-selection is repaired into an independent set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .exact import ENUMERATION_LIMIT, check_limit, enumerate_independent_sets, mis_size
from .graph import Graph


class SamplerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SampleSet:
    """Shots of one sampler call.

    ``bitstrings`` is an ``(n_shots, n)`` 0/1 array, ``valid`` flags shots
    whose register loaded correctly and ``repaired_sets`` holds one
    independent set per valid shot, in shot order.
    """

    bitstrings: np.ndarray
    valid: np.ndarray
    repaired_sets: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.repaired_sets) != int(np.count_nonzero(self.valid)):
            raise ValueError("one repaired set is required per valid shot")

    @property
    def n_shots(self) -> int:
        return len(self.valid)

    @property
    def shots(self) -> list:
        return [(tuple(int(b) for b in row), bool(ok))
                for row, ok in zip(self.bitstrings, self.valid)]

    @classmethod
    def from_sets(cls, sets, n: int, **meta) -> "SampleSet":
        sets = [frozenset(s) for s in sets]
        bits = np.zeros((len(sets), n), dtype=np.uint8)
        for i, s in enumerate(sets):
            bits[i, sorted(s)] = 1
        return cls(bits, np.ones(len(sets), dtype=bool), tuple(sets), meta)


# -- energies -----------------------------------------------------------------

def _bits(graph: Graph, assignment) -> np.ndarray:
    arr = np.asarray(assignment, dtype=np.int64).reshape(-1)
    if arr.shape[0] != graph.n:
        raise ValueError(f"bitstring length {arr.shape[0]} != vertex count {graph.n}")
    return arr


def classical_energy(graph: Graph, assignment, U: float = 2.0) -> float:
    """-sum n_i + U sum_{edges} n_i n_j."""
    if U <= 1:
        raise ValueError("penalty U must exceed 1")
    x = _bits(graph, assignment)
    pen = sum(int(x[u] & x[v]) for u, v in graph.edges)
    return float(-x.sum() + U * pen)


@dataclass(frozen=True)
class IsingForm:
    couplers: dict
    fields: np.ndarray
    constant: float

    def energy(self, spins) -> float:
        z = np.asarray(spins, dtype=float)
        e = self.constant + float(self.fields @ z)
        for (i, j), J in self.couplers.items():
            e += J * z[i] * z[j]
        return e


def to_ising(graph: Graph, U: float = 2.0) -> IsingForm:
    """Rewrite the classical energy in spins z = 2n - 1."""
    if U <= 1:
        raise ValueError("penalty U must exceed 1")
    J = {e: U / 4 for e in graph.sorted_edges()}
    h = np.array([U * graph.degree(i) / 4 - 0.5 for i in range(graph.n)])
    const = -graph.n / 2 + U * graph.edge_count / 4
    return IsingForm(J, h, const)


# -- repair -------------------------------------------------------------------

def repair(graph: Graph, bitstring) -> frozenset:
    """Drop the member with most in-set neighbors (smallest id on ties) until independent."""
    x = _bits(graph, bitstring)
    members = {v for v in range(graph.n) if x[v]}
    conflicts = {v: len(graph.neighbors(v) & members) for v in members}
    while True:
        worst, wc = -1, 0
        for v in sorted(conflicts):
            if conflicts[v] > wc:
                worst, wc = v, conflicts[v]
        if worst < 0:
            return frozenset(members)
        members.discard(worst)
        del conflicts[worst]
        for w in graph.neighbors(worst):
            if w in conflicts:
                conflicts[w] -= 1


def repair_all(graph: Graph, bits: np.ndarray) -> tuple:
    """Repair every row of ``bits``; rows that are already independent pass straight through."""
    if len(bits) == 0:
        return ()
    edges = np.array(graph.sorted_edges(), dtype=np.int64).reshape(-1, 2)
    if len(edges):
        bad = np.any(bits[:, edges[:, 0]] & bits[:, edges[:, 1]], axis=1)
    else:
        bad = np.zeros(len(bits), dtype=bool)
    out = []
    for row, b in zip(bits, bad):
        if b:
            out.append(repair(graph, row))
        else:
            out.append(frozenset(np.flatnonzero(row).tolist()))
    return tuple(out)


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def child_seed(seed, *key) -> np.random.SeedSequence:
    """Deterministic child of ``seed``; unlike ``spawn`` it does not mutate the parent."""
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + key)


def shot_seeds(seed, n_shots: int) -> np.ndarray:
    """One 32-bit seed per shot, derived from ``seed`` independently of execution order."""
    return as_seed_sequence(seed).generate_state(n_shots, dtype=np.uint32)


# -- exact backend ------------------------------------------------------------

def sample_exact(kernel: Graph, n_shots: int, seed, limit: int = ENUMERATION_LIMIT) -> SampleSet:
    """Uniform draws from the independent sets of the two largest (non-zero) sizes."""
    check_limit(kernel, limit, "exact backend")
    if kernel.n == 0:
        return SampleSet.from_sets([frozenset()] * n_shots, 0, backend="exact")
    alpha = mis_size(kernel, limit)
    pool = enumerate_independent_sets(kernel, max(1, alpha - 1), limit)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(pool), size=n_shots)
    return SampleSet.from_sets([pool[i] for i in picks], kernel.n, backend="exact",
                               pool_size=len(pool))


# -- simulated annealing backend ----------------------------------------------

@numba.njit(cache=True)
def _anneal_shots(ptr, idx, n, temps, U, seeds, out):
    cnt = np.zeros(n, dtype=np.int64)
    for s in range(seeds.shape[0]):
        np.random.seed(seeds[s])
        x = out[s]
        for i in range(n):
            x[i] = 1 if np.random.random() < 0.5 else 0
        for i in range(n):
            c = 0
            for k in range(ptr[i], ptr[i + 1]):
                c += x[idx[k]]
            cnt[i] = c
        for t in range(temps.shape[0]):
            T = temps[t]
            for i in range(n):
                if x[i] == 0:
                    dE = -1.0 + U * cnt[i]
                else:
                    dE = 1.0 - U * cnt[i]
                if dE <= 0.0 or np.random.random() < math.exp(-dE / T):
                    x[i] = 1 - x[i]
                    step = 1 if x[i] == 1 else -1
                    for k in range(ptr[i], ptr[i + 1]):
                        cnt[idx[k]] += step


def _csr(graph: Graph):
    ptr = np.zeros(graph.n + 1, dtype=np.int64)
    idx = []
    for v in range(graph.n):
        nb = sorted(graph.neighbors(v))
        idx.extend(nb)
        ptr[v + 1] = ptr[v] + len(nb)
    return ptr, np.array(idx, dtype=np.int64)


SA_DEFAULTS = {"T_hot": 2.0, "T_cold": 0.05, "sweeps_per_vertex": 64, "U": 2.0}


def anneal_bitstrings(graph: Graph, n_shots: int, seed, sweeps=None, T_hot=2.0,
                      T_cold=0.05, U=2.0) -> np.ndarray:
    """Raw Metropolis bitstrings, geometric cooling from ``T_hot`` to ``T_cold``."""
    if U <= 1:
        raise ValueError("penalty U must exceed 1")
    if not 0 < T_cold <= T_hot:
        raise ValueError("need 0 < T_cold <= T_hot")
    if sweeps is None:
        sweeps = SA_DEFAULTS["sweeps_per_vertex"] * graph.n
    if sweeps < 0:
        raise ValueError("sweeps must be non-negative")
    temps = np.geomspace(T_hot, T_cold, int(sweeps)) if sweeps else np.zeros(0)
    ptr, idx = _csr(graph)
    out = np.zeros((n_shots, graph.n), dtype=np.int64)
    _anneal_shots(ptr, idx, graph.n, temps.astype(np.float64), float(U),
                  shot_seeds(seed, n_shots), out)
    return out.astype(np.uint8)


def sample_annealing(kernel: Graph, n_shots: int, seed, sweeps=None, T_hot=2.0,
                     T_cold=0.05, U=2.0, sweeps_per_vertex=None) -> SampleSet:
    if sweeps is None and sweeps_per_vertex is not None:
        sweeps = int(round(sweeps_per_vertex * kernel.n))
    bits = anneal_bitstrings(kernel, n_shots, seed, sweeps, T_hot, T_cold, U)
    return SampleSet(bits, np.ones(n_shots, dtype=bool), repair_all(kernel, bits),
                     {"backend": "sa"})


# -- loading errors -------------------------------------------------------------

def apply_loading_errors(samples: SampleSet, epsilon: float, seed) -> SampleSet:
    """Drop each site with probability ``epsilon``; shots with a missing atom are discarded.

    Missing sites read as 0 in the stored bitstring.
    """
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    bits = samples.bitstrings.copy()
    rng = np.random.default_rng(seed)
    unloaded = rng.random(bits.shape) < epsilon
    bits[unloaded] = 0
    ok_before = samples.valid
    valid = ok_before & ~unloaded.any(axis=1)
    kept = [s for s, keep in zip(samples.repaired_sets, valid[ok_before]) if keep]
    meta = dict(samples.meta, epsilon=epsilon)
    return SampleSet(bits, valid, tuple(kept), meta)


def expected_load_probability(n: int, epsilon: float) -> float:
    return (1 - epsilon) ** n


# -- registry -----------------------------------------------------------------

def _rydberg(kernel, n_shots, seed, **params):
    from .rydberg import sample_rydberg
    return sample_rydberg(kernel, n_shots, seed, **params)


SAMPLERS = {
    "exact": sample_exact,
    "sa": sample_annealing,
    "rydberg": _rydberg,
}


def sample(kernel: Graph, n_shots: int, seed, backend: str = "exact", params=None) -> SampleSet:
    """Dispatch to a named backend; ``params['epsilon']`` adds loading errors."""
    params = dict(params or {})
    epsilon = params.pop("epsilon", 0.0)
    try:
        fn = SAMPLERS[backend]
    except KeyError:
        raise SamplerError(f"unknown backend {backend!r}; "
                           f"choose from {sorted(SAMPLERS)}") from None
    draw_seed, load_seed = child_seed(seed, 0), child_seed(seed, 1)
    out = fn(kernel, n_shots, draw_seed, **params)
    if epsilon:
        out = apply_loading_errors(out, epsilon, load_seed)
    return out
