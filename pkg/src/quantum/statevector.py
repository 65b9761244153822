"""Statevector simulation of the biased tour superposition.

Two backends share one pipeline (prepare -> bias -> project -> measure):

dense
    A sparse register over n*n marker qubits plus n leg ancillas. Marker
    (j, p) is qubit (j-1)*n + (p-1) and is 0 iff city p is the j-th stop; all
    other markers are 1. Ancilla j is qubit n*n + (j-1). Only reachable basis
    states are stored, keyed by the integer whose bit i is qubit i.
    Leg j rotates ancilla j by U(q_ab) under a double zero-control on
    marker (j, a) and marker (j+1 mod n, b), one gate per ordered pair a != b.
tour
    One complex amplitude per fixed-start tour; biasing multiplies each
    amplitude by sqrt(prod q) directly.
"""

from __future__ import annotations
import logging
import math
from collections import Counter
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from config.settings import settings
from errors import InternalError, InvalidArgument, NumericalUnderflow, TooLarge
from quantum.gates import RotationGate
from tsp.instance import MIN_CITIES, TspInstance
from tsp.tours import Tour, tour_at, tour_count, tour_index, tour_leg_sums, tour_orders

logger = logging.getLogger(__name__)

BACKENDS = ("dense", "tour")
DENSE_HARD_CAP = 5


class QubitRegister:
    def __init__(self, n: int, amplitudes: Dict[int, complex]):
        self.n = n
        self.amplitudes = amplitudes

    @property
    def num_qubits(self) -> int:
        return self.n * self.n + self.n

    def marker(self, j: int, p: int) -> int:
        return (j - 1) * self.n + (p - 1)

    def ancilla(self, j: int) -> int:
        return self.n * self.n + (j - 1)

    def copy(self) -> "QubitRegister":
        return QubitRegister(self.n, dict(self.amplitudes))

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    def encode(self, tour: Tour) -> int:
        key = (1 << (self.n * self.n)) - 1
        for j, city in enumerate(tour.order, start=1):
            key &= ~(1 << self.marker(j, city))
        return key

    def _block_bits(self, key: int, j: int) -> int:
        return (key >> ((j - 1) * self.n)) & ((1 << self.n) - 1)

    def ancillas_clear(self, key: int) -> bool:
        return key >> (self.n * self.n) == 0

    def is_valid(self, key: int) -> bool:
        """Exactly one zero marker per block and every ancilla zero."""
        if not self.ancillas_clear(key):
            return False
        full = (1 << self.n) - 1
        for j in range(1, self.n + 1):
            zeros = full & ~self._block_bits(key, j)
            if zeros == 0 or zeros & (zeros - 1):
                return False
        return True

    def decode(self, key: int) -> Tour:
        if not self.is_valid(key):
            raise InternalError(f"basis state {self.bitstring(key)} does not encode a tour")
        full = (1 << self.n) - 1
        order = []
        for j in range(1, self.n + 1):
            zeros = full & ~self._block_bits(key, j)
            order.append(zeros.bit_length())
        try:
            return Tour(order)
        except InvalidArgument as e:
            raise InternalError(f"basis state {self.bitstring(key)} does not encode a tour: {e}")

    def bitstring(self, key: int) -> str:
        bits = [str((key >> i) & 1) for i in range(self.num_qubits)]
        n = self.n
        groups = ["".join(bits[j * n:(j + 1) * n]) for j in range(n + 1)]
        return "_".join(groups)

    def apply_controlled(self, zero_controls: List[int], target: int, gate: RotationGate) -> None:
        """Rotate `target` by `gate` on every branch where all controls read 0."""
        mask = 0
        for c in zero_controls:
            mask |= 1 << c
        tbit = 1 << target
        amps = self.amplitudes
        bases = {key & ~tbit for key in amps if not key & mask}
        for base in bases:
            a0, a1 = gate.apply(amps.get(base, 0j), amps.get(base | tbit, 0j))
            for key, val in ((base, a0), (base | tbit, a1)):
                if val != 0:
                    amps[key] = complex(val)
                else:
                    amps.pop(key, None)


class TourStateVector:
    def __init__(self, n: int, amps: np.ndarray):
        self.n = n
        self.amps = amps

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


State = Union[QubitRegister, TourStateVector]


def resolve_backend(n: int, name: str = "auto") -> str:
    if name == "auto":
        return "dense" if n <= settings.dense_max_n else "tour"
    if name not in BACKENDS:
        raise InvalidArgument(f"unknown backend {name!r}; choose dense, tour or auto")
    return name


def prepare_tour_superposition(n: int, backend: str = "tour", dense_cap: Optional[int] = None,
                               cap: Optional[int] = None) -> State:
    if n < MIN_CITIES:
        raise InvalidArgument(f"need at least {MIN_CITIES} cities, got {n}")
    backend = resolve_backend(n, backend)
    count = tour_count(n)
    if backend == "dense":
        dense_cap = settings.dense_max_n if dense_cap is None else dense_cap
        if dense_cap > DENSE_HARD_CAP:
            raise InvalidArgument(f"dense backend cap may not exceed {DENSE_HARD_CAP}")
        if n > dense_cap:
            raise TooLarge("dense backend", dense_cap, n)
        if n == DENSE_HARD_CAP:
            logger.warning(f"dense backend at n={n}: {n * n + n} qubits, up to {count * 2 ** n} stored amplitudes")
        reg = QubitRegister(n, {})
        amp = complex(1.0 / math.sqrt(count))
        for order in tour_orders(n):
            reg.amplitudes[reg.encode(Tour(order.astype(int) + 1))] = amp
        return reg
    cap = settings.enumeration_cap if cap is None else cap
    if n > cap:
        raise TooLarge("tour backend", cap, n)
    return TourStateVector(n, np.full(count, 1.0 / math.sqrt(count), dtype=complex))


def apply_bias_matrix(state: State, q) -> State:
    """Bias every leg by the gates built from an explicit q matrix."""
    q = np.asarray(q, dtype=float)
    if q.shape != (state.n, state.n):
        raise InvalidArgument(f"bias matrix shape {q.shape} does not match n={state.n}")
    n = state.n
    if isinstance(state, TourStateVector):
        log_q = np.log(q)
        np.fill_diagonal(log_q, 0.0)
        scale = np.exp(0.5 * tour_leg_sums(n, log_q))
        return TourStateVector(n, state.amps * scale)

    reg = state.copy()
    gates = 0
    for j in range(1, n + 1):
        nxt = j % n + 1
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if a == b:
                    continue
                gate = RotationGate(q[a - 1, b - 1])
                if gate.is_identity():
                    continue
                reg.apply_controlled([reg.marker(j, a), reg.marker(nxt, b)], reg.ancilla(j), gate)
                gates += 1
    logger.debug(f"applied {gates} controlled rotations; {len(reg.amplitudes)} basis states stored")
    return reg


def apply_bias_gates(state: State, inst: TspInstance) -> State:
    if inst.n != state.n:
        raise InvalidArgument(f"state has n={state.n} but instance has n={inst.n}")
    return apply_bias_matrix(state, inst.bias_matrix())


def project_valid(state: State) -> Tuple[State, float]:
    """Project onto valid tour encodings; returns (renormalized state, success probability)."""
    if isinstance(state, TourStateVector):
        success = state.norm_squared()
        kept = state.amps
    else:
        kept_amps = {k: a for k, a in state.amplitudes.items() if state.is_valid(k)}
        success = math.fsum(abs(a) ** 2 for a in kept_amps.values())
    if success < settings.underflow_floor:
        raise NumericalUnderflow(f"post-selection success probability {success:.3g} underflows")
    scale = 1.0 / math.sqrt(success)
    if isinstance(state, TourStateVector):
        return TourStateVector(state.n, kept * scale), success
    return QubitRegister(state.n, {k: a * scale for k, a in kept_amps.items()}), success


def branch_weights(state: State) -> np.ndarray:
    """Squared amplitude of each tour's valid branch, indexed like the tour enumeration."""
    if isinstance(state, TourStateVector):
        return np.abs(state.amps) ** 2
    out = np.zeros(tour_count(state.n))
    for key, a in state.amplitudes.items():
        if state.is_valid(key):
            out[tour_index(state.decode(key))] += abs(a) ** 2
    return out


def state_probabilities(state: State) -> np.ndarray:
    w = branch_weights(state)
    total = w.sum()
    if total <= 0.0:
        raise NumericalUnderflow("state has no weight on valid tour encodings")
    return w / total


class MeasurementResult:
    """Shots in draw order, stored as tour indices."""

    def __init__(self, n: int, indices: np.ndarray, seed: int):
        self.n = n
        self.indices = indices
        self.seed = seed

    def __len__(self) -> int:
        return len(self.indices)

    def counts(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=tour_count(self.n))

    def frequencies(self) -> np.ndarray:
        return self.counts() / len(self.indices)

    def tours(self) -> List[Tour]:
        decoded = {int(i): tour_at(self.n, int(i)) for i in np.unique(self.indices)}
        return [decoded[int(i)] for i in self.indices]

    def as_counter(self) -> Counter:
        return Counter({tour_at(self.n, int(i)): int(c) for i, c in enumerate(self.counts()) if c})


def _draw_chunk(cdf: np.ndarray, seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    pos = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(pos, len(cdf) - 1)


def outcome_table(state: State) -> Tuple[np.ndarray, np.ndarray]:
    """(probabilities, tour index per outcome) over the stored basis states."""
    if isinstance(state, TourStateVector):
        probs = np.abs(state.amps) ** 2
        return probs, np.arange(len(probs))
    keys = sorted(state.amplitudes)
    probs = np.array([abs(state.amplitudes[k]) ** 2 for k in keys])
    # only outcomes that can actually be drawn need decoding
    labels = np.full(len(keys), -1, dtype=np.int64)
    for i, k in enumerate(keys):
        if probs[i] > 0.0:
            labels[i] = tour_index(state.decode(k))
    return probs, labels


def measure(state: State, seed: int, shots: int, n_jobs: Optional[int] = None) -> MeasurementResult:
    """Draw `shots` i.i.d. outcomes by inverse CDF.

    Shots are split into fixed-size chunks, each with its own Philox stream
    spawned from `seed`, so the result does not depend on the worker count.
    """
    if shots < 1:
        raise InvalidArgument(f"shots must be >= 1, got {shots}")
    norm = state.norm_squared()
    if abs(norm - 1.0) > 1e-9:
        raise InvalidArgument(f"state norm^2 is {norm:.12g}; project_valid before measuring")
    probs, labels = outcome_table(state)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]

    chunk = settings.shot_chunk
    sizes = [min(chunk, shots - start) for start in range(0, shots, chunk)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    n_jobs = settings.threads if n_jobs is None else n_jobs
    if len(sizes) > 1 and n_jobs != 1:
        parts = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_draw_chunk)(cdf, ss, size) for ss, size in zip(streams, sizes)
        )
    else:
        parts = [_draw_chunk(cdf, ss, size) for ss, size in zip(streams, sizes)]
    outcomes = labels[np.concatenate(parts)]
    if np.any(outcomes < 0):
        raise InternalError("sampled a basis state that does not encode a tour")
    return MeasurementResult(state.n, outcomes, seed)


def dump_state(state: State) -> str:
    if isinstance(state, TourStateVector):
        lines = [f"{tour_at(state.n, i)} {a.real:.12g} {a.imag:.12g}"
                 for i, a in enumerate(state.amps) if a != 0]
    else:
        lines = [f"{state.bitstring(k)} {a.real:.12g} {a.imag:.12g}"
                 for k, a in sorted(state.amplitudes.items())]
    return "\n".join(lines) + "\n"
