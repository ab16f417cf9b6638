"""State-vector simulation of a Rydberg atom register under a global drive.

Units: micrometers, microseconds, rad/us.  Hamiltonian (hbar = 1)::

    H(t) = Omega(t)/2 sum_i (e^{i phi} |0><1|_i + h.c.)
           - Delta(t) sum_i n_i + sum_{i<j} C6 / |x_i - x_j|^6 n_i n_j

Basis index ``b`` encodes atom ``i`` in bit ``i`` (1 = Rydberg state).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import Graph, pairwise_distance
from .sampling import SampleSet, repair_all

# Aquila van der Waals coefficient from the published device specification,
# 5.42e-24 rad m^6 / s, converted to rad um^6 / us
C6_AQUILA = 5.42e6
OMEGA_MAX_DEFAULT = 2 * math.pi * 2.5  # rad/us
TAU_DEFAULT = 4.0  # us
MIN_SEPARATION = 4.0  # um, smallest site spacing accepted by the device
ATOM_LIMIT = 16
ATOM_HARD_LIMIT = 20
RAMP_FRACTION = 0.15

# fourth-order composition of the symmetric Strang step
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = -(2.0 ** (1.0 / 3.0)) * _W1


class EvolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Piecewise-linear drive; values are given at the knots in ``times``."""

    times: tuple
    omega: tuple
    delta: tuple
    phi: tuple

    def __post_init__(self):
        arrs = [np.asarray(x, dtype=float).reshape(-1)
                for x in (self.times, self.omega, self.delta, self.phi)]
        t = arrs[0]
        if len(t) == 0 or any(len(a) != len(t) for a in arrs):
            raise ValueError("schedule arrays must be non-empty and equally long")
        if t[0] != 0.0:
            raise ValueError("schedule must start at t = 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("knot times must be strictly increasing")
        if np.any(arrs[1] < 0):
            raise ValueError("Rabi frequency must be non-negative")
        if arrs[1][0] != 0 or arrs[1][-1] != 0:
            raise ValueError("Rabi frequency must vanish at both ends")
        for name, a in zip(("times", "omega", "delta", "phi"), arrs):
            object.__setattr__(self, name, tuple(a.tolist()))

    @property
    def duration(self) -> float:
        return self.times[-1]

    @property
    def omega_max(self) -> float:
        return max(self.omega)

    def at(self, t: float) -> tuple[float, float, float]:
        return (float(np.interp(t, self.times, self.omega)),
                float(np.interp(t, self.times, self.delta)),
                float(np.interp(t, self.times, self.phi)))

    def to_dict(self) -> dict:
        return {"times": list(self.times), "omega": list(self.omega),
                "delta": list(self.delta), "phi": list(self.phi)}


def default_schedule(omega_max=OMEGA_MAX_DEFAULT, delta_initial=None, delta_final=None,
                     tau_f=TAU_DEFAULT, ramp_fraction=RAMP_FRACTION) -> Schedule:
    """Trapezoidal Rabi pulse with a linear detuning sweep and zero phase.

    Without explicit detunings the sweep runs from ``-2 omega_max`` to
    ``+omega_max``.
    """
    if delta_initial is None:
        delta_initial = -2.0 * omega_max
    if delta_final is None:
        delta_final = omega_max
    if not delta_initial < 0 < delta_final:
        raise ValueError("need delta_initial < 0 < delta_final")
    if tau_f <= 0 or omega_max <= 0:
        raise ValueError("tau_f and omega_max must be positive")
    r = ramp_fraction * tau_f
    times = (0.0, r, tau_f - r, tau_f)
    slope = (delta_final - delta_initial) / tau_f
    delta = tuple(delta_initial + slope * t for t in times)
    return Schedule(times, (0.0, omega_max, omega_max, 0.0), delta, (0.0,) * 4)


def blockade_radius(c6: float = C6_AQUILA, omega_max: float = OMEGA_MAX_DEFAULT) -> float:
    if c6 <= 0 or omega_max <= 0:
        raise ValueError("c6 and omega_max must be positive")
    return (c6 / omega_max) ** (1.0 / 6.0)


@dataclass(frozen=True)
class AhsProgram:
    sites: tuple
    schedule: Schedule
    c6: float = C6_AQUILA
    min_separation: float = MIN_SEPARATION

    def __post_init__(self):
        sites = tuple((float(x), float(y)) for x, y in self.sites)
        object.__setattr__(self, "sites", sites)
        for i in range(len(sites)):
            for j in range(i + 1, len(sites)):
                d = pairwise_distance(sites[i], sites[j])
                if d < self.min_separation * (1 - 1e-9):
                    raise ValueError(f"atoms {i} and {j} are {d:.3f} um apart, below the "
                                     f"minimum separation {self.min_separation} um")

    @property
    def n_atoms(self) -> int:
        return len(self.sites)

    def interactions(self) -> np.ndarray:
        pts = np.asarray(self.sites, dtype=float).reshape(-1, 2)
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        with np.errstate(divide="ignore"):
            V = np.where(d > 0, self.c6 / d ** 6, 0.0)
        return V

    def to_dict(self) -> dict:
        return {"register": {"sites": [list(s) for s in self.sites]},
                "schedule": self.schedule.to_dict(), "c6": self.c6}

    @classmethod
    def from_dict(cls, doc: dict) -> "AhsProgram":
        s = doc["schedule"]
        sched = Schedule(s["times"], s["omega"], s["delta"], s["phi"])
        return cls(tuple(map(tuple, doc["register"]["sites"])), sched,
                   float(doc.get("c6", C6_AQUILA)))


@dataclass(frozen=True)
class RegisterDiagnostics:
    ratio: float
    in_regime: bool
    blockade_pairs: frozenset
    missing_edges: frozenset
    extra_edges: frozenset
    message: str


def validate_register(program: AhsProgram, spacing: float, graph: Graph | None = None,
                      ) -> RegisterDiagnostics:
    """Check that the blockade radius sits in the union-jack window sqrt(2) <= R_b/a < 2.

    When ``graph`` is given, its edges are compared against the atom pairs
    that fall inside the blockade radius.
    """
    rb = blockade_radius(program.c6, program.schedule.omega_max)
    ratio = rb / spacing
    ok = math.sqrt(2) * (1 - 1e-9) <= ratio < 2
    pairs = set()
    sites = program.sites
    for i in range(len(sites)):
        for j in range(i + 1, len(sites)):
            if pairwise_distance(sites[i], sites[j]) <= rb:
                pairs.add((i, j))
    missing = extra = frozenset()
    if graph is not None:
        missing = frozenset(graph.edges - pairs)
        extra = frozenset(pairs - graph.edges)
    if ok:
        msg = f"R_b/a = {ratio:.3f} lies in [sqrt(2), 2)"
    elif ratio < math.sqrt(2):
        msg = (f"R_b/a = {ratio:.3f} is below sqrt(2): diagonal neighbors would not be "
               f"blockaded")
    else:
        msg = f"R_b/a = {ratio:.3f} is >= 2: next-nearest lattice sites would be blockaded"
    if missing or extra:
        ok = False
        msg += f"; {len(missing)} graph edges outside blockade, {len(extra)} extra pairs"
    return RegisterDiagnostics(ratio, ok, frozenset(pairs), missing, extra, msg)


@dataclass(frozen=True)
class QuantumState:
    amplitudes: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_atoms(self) -> int:
        return int(len(self.amplitudes)).bit_length() - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))

    def occupations(self) -> np.ndarray:
        """<n_i> for every atom."""
        p = self.probabilities
        idx = np.arange(len(p))
        return np.array([p[(idx >> i) & 1 == 1].sum() for i in range(self.n_atoms)])


def ground_state(n: int) -> QuantumState:
    psi = np.zeros(2 ** n, dtype=np.complex128)
    psi[0] = 1.0
    return QuantumState(psi)


@numba.njit(cache=True)
def _mix(psi, n, omega, phi, dt):
    theta = 0.5 * omega * dt
    c = math.cos(theta)
    s = math.sin(theta)
    up = -1j * s * complex(math.cos(phi), -math.sin(phi))  # <1|U|0>
    down = -1j * s * complex(math.cos(phi), math.sin(phi))  # <0|U|1>
    dim = psi.shape[0]
    for i in range(n):
        stride = 1 << i
        for hi in range(0, dim, 2 * stride):
            for b in range(hi, hi + stride):
                a0 = psi[b]
                a1 = psi[b + stride]
                psi[b] = c * a0 + down * a1
                psi[b + stride] = up * a0 + c * a1


@numba.njit(cache=True)
def _diag(psi, phases, count, n, delta, dt):
    # interaction phases are precomputed per step size; detuning depends on count only
    det = np.empty(n + 1, dtype=np.complex128)
    for k in range(n + 1):
        det[k] = complex(math.cos(dt * delta * k), math.sin(dt * delta * k))
    for b in range(psi.shape[0]):
        psi[b] *= phases[b] * det[count[b]]


@numba.njit(cache=True)
def _run(psi, n, interaction, count, times, omega, delta, phi, n_steps, w1, w0):
    total = times[-1]
    weights = np.array([w1, w0, w1])
    for seg in range(times.shape[0] - 1):
        ta = times[seg]
        tb = times[seg + 1]
        # step boundaries land on every knot so each segment is smooth
        k = max(1, int(math.ceil(n_steps * (tb - ta) / total)))
        h = (tb - ta) / k
        so = (omega[seg + 1] - omega[seg]) / (tb - ta)
        sd = (delta[seg + 1] - delta[seg]) / (tb - ta)
        sp = (phi[seg + 1] - phi[seg]) / (tb - ta)
        p_outer = np.exp(-0.5j * w1 * h * interaction)
        p_inner = np.exp(-0.5j * w0 * h * interaction)
        for m in range(k):
            t = ta + m * h
            for q in range(3):
                dt = weights[q] * h
                tm = t + 0.5 * dt - ta
                om = omega[seg] + so * tm
                de = delta[seg] + sd * tm
                ph = phi[seg] + sp * tm
                phases = p_inner if q == 1 else p_outer
                # symmetric Strang step with the drive frozen at the midpoint
                _diag(psi, phases, count, n, de, 0.5 * dt)
                _mix(psi, n, om, ph, dt)
                _diag(psi, phases, count, n, de, 0.5 * dt)
                t += dt
    return psi


class _Propagator:
    def __init__(self, program: AhsProgram):
        n = program.n_atoms
        self.n = n
        idx = np.arange(2 ** n)
        bits = [((idx >> i) & 1).astype(np.float64) for i in range(n)]
        self.count = np.sum(bits, axis=0).astype(np.int64) if n else np.zeros(1, np.int64)
        V = program.interactions()
        ev = np.zeros(2 ** n)
        for i in range(n):
            for j in range(i + 1, n):
                ev += V[i, j] * bits[i] * bits[j]
        self.interaction = ev
        sch = program.schedule
        self.knots = tuple(np.asarray(x, dtype=np.float64)
                           for x in (sch.times, sch.omega, sch.delta, sch.phi))

    def run(self, psi, n_steps: int):
        return _run(psi, self.n, self.interaction, self.count, *self.knots,
                    int(n_steps), _W1, _W0)


def evolve(program: AhsProgram, n_steps: int | None = None, tol: float = 1e-5,
           limit: int = ATOM_LIMIT, max_steps: int = 2 ** 20) -> QuantumState:
    """Propagate the all-ground state through the program.

    With ``n_steps=None`` the step count is doubled until no final basis
    probability moves by more than ``tol``; the finer result is returned.
    """
    n = program.n_atoms
    if n > limit:
        raise EvolutionError(f"register of {n} atoms exceeds the simulator limit of {limit}")
    if n > ATOM_HARD_LIMIT:
        raise EvolutionError(f"register of {n} atoms exceeds the hard limit {ATOM_HARD_LIMIT}")
    if n > ATOM_LIMIT:
        warnings.warn(f"state vector of 2^{n} amplitudes needs "
                      f"{16 * 2 ** n / 2 ** 20:.0f} MiB per copy")
    psi0 = ground_state(n).amplitudes
    if program.schedule.duration == 0:
        return QuantumState(psi0, {"steps": 0})
    prop = _Propagator(program)
    if n_steps is not None:
        psi = prop.run(psi0.copy(), n_steps)
        steps = n_steps
    else:
        steps = max(16, math.ceil(4 * program.schedule.duration))
        psi = prop.run(psi0.copy(), steps)
        while True:
            if 2 * steps > max_steps:
                raise EvolutionError(f"no convergence to {tol} within {max_steps} steps")
            finer = prop.run(psi0.copy(), 2 * steps)
            diff = np.max(np.abs(np.abs(finer) ** 2 - np.abs(psi) ** 2))
            psi, steps = finer, 2 * steps
            if diff < tol:
                break
    drift = abs(float(np.vdot(psi, psi).real) - 1.0)
    if drift > 1e-6:
        raise EvolutionError(f"norm drift {drift:.2e} exceeds 1e-6")
    return QuantumState(psi, {"steps": steps, "norm_drift": drift})


def measure(state: QuantumState, n_shots: int, seed, graph: Graph | None = None) -> SampleSet:
    """Born-rule samples of the computational basis, repaired against ``graph``."""
    p = state.probabilities
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(p), size=n_shots, p=p)
    n = state.n_atoms
    bits = ((idx[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)
    if graph is None:
        graph = Graph(n)
    return SampleSet(bits, np.ones(n_shots, dtype=bool), repair_all(graph, bits),
                     {"backend": "rydberg"})


def sample_rydberg(kernel: Graph, n_shots: int, seed, omega_max=OMEGA_MAX_DEFAULT,
                   delta_initial=None, delta_final=None, tau_f=TAU_DEFAULT, c6=C6_AQUILA,
                   limit: int = ATOM_LIMIT) -> SampleSet:
    """Kernel sampler: default schedule on the kernel's own atom positions."""
    if kernel.coords is None:
        raise ValueError("rydberg backend needs vertex coordinates (unit-disk graphs only)")
    if kernel.n > limit:
        raise EvolutionError(f"kernel of {kernel.n} atoms exceeds the simulator limit "
                             f"of {limit}")
    sched = default_schedule(omega_max, delta_initial, delta_final, tau_f)
    program = AhsProgram(kernel.coords, sched, c6)
    state = evolve(program, limit=limit)
    out = measure(state, n_shots, seed, kernel)
    out.meta["steps"] = state.meta.get("steps")
    return out
