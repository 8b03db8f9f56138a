"""Dense state-vector backend.

States are full vectors of 2^n complex amplitudes (n <= 24).  Gates are
applied with bit-mask index kernels — nothing ever materializes a
2^n x 2^n matrix; the matrix forms in :mod:`qsim.circuit` exist for unit
tests only.

Measurement observables are single-qubit spin directions: a Pauli axis,
or an arbitrary Bloch axis (theta, phi) meaning

    O = cos(theta) Z + sin(theta) cos(phi) X + sin(theta) sin(phi) Y.

The +1 outcome has probability ``p_plus = (1 + <O>)/2``; collapse
projects onto the outcome's eigenspace and renormalizes, zeroing
amplitude dust below 1e-12.  (Computing ``p_plus`` from the expectation
rather than a projected norm lets symmetric cases like ``<Z> = 0``
cancel exactly in floating point.)

``run`` samples whole circuits.  Shot ``i`` draws its measurement
randomness from the Philox counter block reserved for shot ``i`` (see
:mod:`qsim.rng`), so results are reproducible bit for bit regardless of
batching.  Histogram keys are classical-bit strings, bit 0 first, with
``0`` recording the +1 outcome.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .circuit import (
    Circuit,
    CircuitOp,
    GateApp,
    GateKind,
    Measure,
    OracleApp,
    PauliAxis,
    gate_matrix,
    validate,
)
from .errors import DegenerateNorm, TooManyQubits
from .rng import RNG_ID, shot_uniforms

MAX_QUBITS = 24

_DUST = 1e-12
_BATCH_BYTES = 1 << 27  # amplitude budget per shot batch (~128 MB)


@dataclass(frozen=True)
class BlochAxis:
    """A measurement direction: polar angle from +Z, azimuth from +X."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError("phi must lie in [0, 2*pi)")


Axis = Union[PauliAxis, BlochAxis]


@dataclass(frozen=True)
class MeasurementSpec:
    qubit: int
    axis: Axis


@dataclass(frozen=True)
class PureState:
    n: int
    amps: np.ndarray  # complex128, length 2**n

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"amplitude vector must have length {1 << self.n}")
        object.__setattr__(self, "amps", amps)


@dataclass(frozen=True)
class MeasureOutcome:
    outcome: int  # +1 or -1
    p_plus: float
    state: PureState


@dataclass(frozen=True)
class RunResult:
    backend: str
    shots: int
    seed: int
    rng_id: str
    counts: dict[str, int]
    final_state: object | None = None

    @property
    def final_state_available(self) -> bool:
        return self.final_state is not None


def init_state(n: int, bits: str | None = None) -> PureState:
    """Computational-basis state |bits>, defaulting to |0...0>."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > MAX_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    index = 0
    if bits is not None:
        if len(bits) != n or any(c not in "01" for c in bits):
            raise ValueError(f"bits must be {n} characters of 0/1")
        index = int(bits, 2)  # q0 is the leftmost character and the top bit
    amps[index] = 1.0
    return PureState(n, amps)


# ---------------------------------------------------------------------------
# Index kernels.  Qubit q owns bit (n - 1 - q) of the basis index.


def _bitpos(n: int, q: int) -> int:
    return n - 1 - q


@lru_cache(maxsize=None)
def _pair_indices(n: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis indices with qubit q equal to 0, and their partners with q = 1."""
    step = 1 << _bitpos(n, q)
    block = step << 1
    base = np.arange(0, 1 << n, block)
    idx0 = (base[:, None] + np.arange(step)[None, :]).ravel()
    idx1 = idx0 + step
    idx0.setflags(write=False)
    idx1.setflags(write=False)
    return idx0, idx1

@lru_cache(maxsize=None)
def _cnot_indices(n: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    v = np.arange(1 << n)
    sel = ((v >> _bitpos(n, control)) & 1 == 1) & ((v >> _bitpos(n, target)) & 1 == 0)
    i0 = v[sel]
    i1 = i0 + (1 << _bitpos(n, target))
    i0.setflags(write=False)
    i1.setflags(write=False)
    return i0, i1


@lru_cache(maxsize=None)
def _oracle_perm(n: int, inputs: tuple[int, ...], output: int, table: tuple[int, ...]) -> np.ndarray:
    v = np.arange(1 << n)
    x = np.zeros(1 << n, dtype=np.int64)
    for q in inputs:  # first listed input is the top bit of the table index
        x = (x << 1) | ((v >> _bitpos(n, q)) & 1)
    flips = np.asarray(table, dtype=np.int64)[x] << _bitpos(n, output)
    perm = v ^ flips  # an involution: f(x) does not touch the input bits
    perm.setflags(write=False)
    return perm


def _apply_1q(amps: np.ndarray, n: int, q: int, u: np.ndarray) -> None:
    idx0, idx1 = _pair_indices(n, q)
    a0 = amps[..., idx0]
    a1 = amps[..., idx1]
    amps[..., idx0] = u[0, 0] * a0 + u[0, 1] * a1
    amps[..., idx1] = u[1, 0] * a0 + u[1, 1] * a1


def _apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> None:
    i0, i1 = _cnot_indices(n, control, target)
    a = amps[..., i0]
    amps[..., i0] = amps[..., i1]
    amps[..., i1] = a


def _apply_gate(amps: np.ndarray, n: int, op: GateApp) -> None:
    if op.kind is GateKind.I:
        return
    if op.kind is GateKind.CNOT:
        _apply_cnot(amps, n, op.targets[0], op.targets[1])
    else:
        _apply_1q(amps, n, op.targets[0], gate_matrix(op.kind))


def _apply_oracle(amps: np.ndarray, n: int, op: OracleApp) -> None:
    perm = _oracle_perm(n, op.inputs, op.output, op.function.table)
    amps[...] = amps[..., perm]


def apply_op(state: PureState, op: CircuitOp, cbits: Iterable[int] | None = None) -> PureState:
    """Apply one op, returning a fresh state (inputs are never mutated).

    ``cbits`` supplies the classical register for conditioned gates.
    ``Measure`` ops are not handled here — use :func:`measure`.
    """
    amps = state.amps.copy()
    if isinstance(op, GateApp):
        if op.condition is not None:
            if cbits is None:
                raise ValueError("conditioned gate needs the classical register")
            if not list(cbits)[op.condition]:
                return PureState(state.n, amps)
        _apply_gate(amps, state.n, op)
    elif isinstance(op, OracleApp):
        _apply_oracle(amps, state.n, op)
    elif isinstance(op, Measure):
        raise ValueError("apply_op does not measure; use measure()")
    else:
        raise TypeError(f"unknown op {op!r}")
    return PureState(state.n, amps)


def evolve(circuit: Circuit, start: PureState | None = None) -> PureState:
    """Run a measurement-free, unconditioned circuit and return the state."""
    bad = validate(circuit)
    if bad:
        raise ValueError(f"invalid circuit: {bad[0].message}")
    state = start if start is not None else init_state(circuit.n_qubits)
    for op in circuit.ops:
        if isinstance(op, Measure) or (isinstance(op, GateApp) and op.condition is not None):
            raise ValueError("evolve handles gate-only circuits; use run() for measurements")
        state = apply_op(state, op)
    return state


# ---------------------------------------------------------------------------
# Measurement


def _observable(axis: Axis) -> np.ndarray:
    if isinstance(axis, PauliAxis):
        return gate_matrix(GateKind[axis.value])
    ct, st = math.cos(axis.theta), math.sin(axis.theta)
    off = st * complex(math.cos(axis.phi), -math.sin(axis.phi))
    return np.array([[ct, off], [off.conjugate(), -ct]], dtype=np.complex128)


def _expectation(amps: np.ndarray, n: int, q: int, obs: np.ndarray) -> np.ndarray:
    """<O> on qubit q; summed per pair first so symmetric terms cancel exactly."""
    idx0, idx1 = _pair_indices(n, q)
    a0 = amps[..., idx0]
    a1 = amps[..., idx1]
    o00 = obs[0, 0].real
    o11 = obs[1, 1].real
    per_pair = (
        o00 * (a0.real * a0.real + a0.imag * a0.imag)
        + o11 * (a1.real * a1.real + a1.imag * a1.imag)
        + 2.0 * (np.conj(a0) * a1 * obs[0, 1]).real
    )
    return per_pair.sum(axis=-1)


def _collapse(amps: np.ndarray, n: int, q: int, obs: np.ndarray, outcome, p) -> None:
    """In-place projection onto the outcome eigenspace, renormalized.

    ``outcome`` and ``p`` are scalars, or per-row arrays for a batch.
    """
    idx0, idx1 = _pair_indices(n, q)
    a0 = amps[..., idx0]
    a1 = amps[..., idx1]
    t0 = obs[0, 0] * a0 + obs[0, 1] * a1
    t1 = obs[1, 0] * a0 + obs[1, 1] * a1
    s = np.asarray(outcome, dtype=np.float64)
    scale = 2.0 * np.sqrt(np.asarray(p, dtype=np.float64))
    if s.ndim:  # batch: one outcome per row
        s = s[:, None]
        scale = scale[:, None]
    amps[..., idx0] = (a0 + s * t0) / scale
    amps[..., idx1] = (a1 + s * t1) / scale
    small = np.abs(amps) < _DUST
    if small.any():
        amps[small] = 0.0


def project(state: PureState, spec: MeasurementSpec, outcome: int) -> tuple[float, PureState | None]:
    """Probability of ``outcome`` (+1/-1) and the collapsed state.

    The collapsed state is ``None`` when the branch weight is below the
    degeneracy threshold.
    """
    if not 0 <= spec.qubit < state.n:
        raise ValueError(f"qubit q{spec.qubit} out of range")
    obs = _observable(spec.axis)
    e = float(_expectation(state.amps, state.n, spec.qubit, obs))
    p = min(max(0.5 * (1.0 + outcome * e), 0.0), 1.0)
    if p < _DUST:
        return p, None
    amps = state.amps.copy()
    _collapse(amps, state.n, spec.qubit, obs, outcome, p)
    return p, PureState(state.n, amps)


def measure(state: PureState, spec: MeasurementSpec, rng: np.random.Generator) -> MeasureOutcome:
    """Sample one projective measurement (Born rule); returns a fresh state."""
    if not 0 <= spec.qubit < state.n:
        raise ValueError(f"qubit q{spec.qubit} out of range")
    obs = _observable(spec.axis)
    e = float(_expectation(state.amps, state.n, spec.qubit, obs))
    p_plus = min(max(0.5 * (1.0 + e), 0.0), 1.0)
    outcome = 1 if rng.random() < p_plus else -1
    p = p_plus if outcome == 1 else 1.0 - p_plus
    if p < _DUST:
        raise DegenerateNorm(f"branch weight {p} too small to collapse onto")
    amps = state.amps.copy()
    _collapse(amps, state.n, spec.qubit, obs, outcome, p)
    return MeasureOutcome(outcome, p_plus, PureState(state.n, amps))


def joint_probabilities(
    state: PureState, specs: tuple[MeasurementSpec, ...]
) -> dict[tuple[int, ...], float]:
    """Exact joint outcome distribution for simultaneous single-qubit
    measurements on distinct qubits, keyed by tuples of +1/-1."""
    qubits = [s.qubit for s in specs]
    if len(set(qubits)) != len(qubits):
        raise ValueError("joint measurement qubits must be distinct")
    out: dict[tuple[int, ...], float] = {}

    def walk(st: PureState | None, depth: int, prefix: tuple[int, ...], weight: float) -> None:
        if depth == len(specs):
            out[prefix] = weight
            return
        for o in (1, -1):
            if st is None or weight == 0.0:
                walk(None, depth + 1, prefix + (o,), 0.0)
                continue
            p, collapsed = project(st, specs[depth], o)
            walk(collapsed, depth + 1, prefix + (o,), weight * p)

    walk(state, 0, (), 1.0)
    return out


def equal_up_to_global_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """True iff a = c*b for a unit complex c, elementwise within tol.

    c is read off the first amplitude of magnitude above 1e-8.
    """
    if a.n != b.n:
        return False
    mags = np.abs(b.amps)
    i = int(np.argmax(mags > 1e-8))
    if mags[i] <= 1e-8:
        return bool(np.max(np.abs(a.amps)) <= tol)
    c = a.amps[i] / b.amps[i]
    return bool(np.max(np.abs(a.amps - c * b.amps)) <= tol)


# ---------------------------------------------------------------------------
# Whole-circuit sampling


def _counts_from_bits(cbits: np.ndarray, counter: Counter) -> None:
    if cbits.shape[1] == 0:
        counter[""] += cbits.shape[0]
        return
    chars = (cbits + ord("0")).astype(np.uint8)
    for row in chars:
        counter[row.tobytes().decode("ascii")] += 1


def run(circuit: Circuit, shots: int, seed: int, keep_final_state: bool = False) -> RunResult:
    """Sample ``shots`` executions; returns the classical-bit histogram.

    Shots are executed in vectorized batches, each shot drawing its
    measurement randomness from its own counter block, so the result is
    identical to running the shots one at a time.
    """
    bad = validate(circuit)
    if bad:
        raise ValueError(f"invalid circuit: op {bad[0].op_index}: {bad[0].message}")
    if shots < 1:
        raise ValueError("shots must be positive")
    n = circuit.n_qubits
    if n > MAX_QUBITS:
        raise TooManyQubits(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")

    n_meas = sum(isinstance(op, Measure) for op in circuit.ops)
    uniforms = shot_uniforms(seed, shots, n_meas)
    batch_cap = max(1, _BATCH_BYTES // (16 << n))
    counter: Counter = Counter()
    final_state: PureState | None = None

    done = 0
    while done < shots:
        b = min(batch_cap, shots - done)
        amps = np.zeros((b, 1 << n), dtype=np.complex128)
        amps[:, 0] = 1.0
        cbits = np.zeros((b, circuit.n_cbits), dtype=np.uint8)
        u = uniforms[done : done + b]
        m = 0
        for op in circuit.ops:
            if isinstance(op, GateApp):
                if op.condition is None:
                    _apply_gate(amps, n, op)
                else:
                    mask = cbits[:, op.condition] == 1
                    if mask.all():
                        _apply_gate(amps, n, op)
                    elif mask.any():
                        sub = amps[mask]
                        _apply_gate(sub, n, op)
                        amps[mask] = sub
            elif isinstance(op, OracleApp):
                _apply_oracle(amps, n, op)
            else:
                obs = _observable(op.axis)
                e = _expectation(amps, n, op.qubit, obs)
                p_plus = np.clip(0.5 * (1.0 + e), 0.0, 1.0)
                outcome = np.where(u[:, m] < p_plus, 1, -1)
                m += 1
                p = np.where(outcome == 1, p_plus, 1.0 - p_plus)
                if (p < _DUST).any():
                    raise DegenerateNorm("collapse onto a zero-weight branch")
                _collapse(amps, n, op.qubit, obs, outcome, p)
                cbits[:, op.dest] = (1 - outcome) // 2
        _counts_from_bits(cbits, counter)
        if keep_final_state:
            final_state = PureState(n, amps[-1].copy())
        done += b

    return RunResult(
        backend="sv",
        shots=shots,
        seed=seed,
        rng_id=RNG_ID,
        counts=dict(sorted(counter.items())),
        final_state=final_state,
    )
