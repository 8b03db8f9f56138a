"""Line-oriented text format for circuits.

Grammar (keywords case-insensitive, ``#`` starts a comment, blank lines
ignored)::

    qubits <n>                      # required first line
    cbits <m>                       # optional, immediately after qubits
    x|y|z|r|h|s q<i>                # one-qubit gates
    cnot q<i> q<j>                  # controlled NOT, control first
    cif c<k> <gate line>            # apply the gate only when bit k is 1
    oracle <tt> q<i1> .. q<in> -> q<out>
    measure q<i> X|Y|Z -> c<k>

``<tt>`` is the oracle truth table as a bit string of length 2^n; the
table index is the big-endian reading of the input qubits in the order
they are listed.  Diagnostics carry the 1-based line number.
"""

from __future__ import annotations

import re

from .circuit import (
    BooleanFunction,
    Circuit,
    CircuitOp,
    GateApp,
    GateKind,
    Measure,
    OracleApp,
    PauliAxis,
)
from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    MalformedHeader,
    UndefinedConditionBit,
    UnknownGate,
)

_ONE_QUBIT_GATES = {"x", "y", "z", "r", "h", "s", "i"}
_Q_RE = re.compile(r"^q(\d+)$")
_C_RE = re.compile(r"^c(\d+)$")
_TT_RE = re.compile(r"^[01]+$")


def _q_index(token: str, line: int, n_qubits: int) -> int:
    m = _Q_RE.match(token)
    if not m:
        raise ArityMismatch(line, f"expected a qubit like q0, got {token!r}")
    q = int(m.group(1))
    if q >= n_qubits:
        raise IndexOutOfRange(line, f"qubit q{q} out of range (circuit has {n_qubits})")
    return q


def _c_index(token: str, line: int, n_cbits: int) -> int:
    m = _C_RE.match(token)
    if not m:
        raise ArityMismatch(line, f"expected a classical bit like c0, got {token!r}")
    c = int(m.group(1))
    if c >= n_cbits:
        raise IndexOutOfRange(line, f"classical bit c{c} out of range (circuit has {n_cbits})")
    return c


def parse_circuit(text: str) -> Circuit:
    n_qubits: int | None = None
    n_cbits = 0
    ops: list[CircuitOp] = []
    written: set[int] = set()
    saw_op = False
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), 1):
        last_line = lineno
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.lower().split()
        head = tokens[0]

        if n_qubits is None:
            if head != "qubits":
                raise MalformedHeader(lineno, f"first statement must be 'qubits <n>', got {head!r}")
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise MalformedHeader(lineno, "usage: qubits <n>")
            n_qubits = int(tokens[1])
            if n_qubits < 1:
                raise MalformedHeader(lineno, "circuit needs at least one qubit")
            continue

        if head == "qubits":
            raise MalformedHeader(lineno, "duplicate qubits declaration")
        if head == "cbits":
            if saw_op or n_cbits:
                raise MalformedHeader(lineno, "cbits must appear once, directly after qubits")
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise MalformedHeader(lineno, "usage: cbits <m>")
            n_cbits = int(tokens[1])
            continue

        saw_op = True
        condition: int | None = None
        if head == "cif":
            if len(tokens) < 3:
                raise ArityMismatch(lineno, "usage: cif c<k> <gate> ...")
            condition = _c_index(tokens[1], lineno, n_cbits)
            if condition not in written:
                raise UndefinedConditionBit(
                    lineno, f"condition bit c{condition} is not written by any earlier measure"
                )
            tokens = tokens[2:]
            head = tokens[0]
            if head not in _ONE_QUBIT_GATES and head != "cnot":
                raise UnknownGate(lineno, f"cif must be followed by a gate, got {head!r}")

        if head in _ONE_QUBIT_GATES:
            if len(tokens) != 2:
                raise ArityMismatch(lineno, f"usage: {head} q<i>")
            q = _q_index(tokens[1], lineno, n_qubits)
            ops.append(GateApp(GateKind(head), (q,), condition))
        elif head == "cnot":
            if len(tokens) != 3:
                raise ArityMismatch(lineno, "usage: cnot q<control> q<target>")
            qc = _q_index(tokens[1], lineno, n_qubits)
            qt = _q_index(tokens[2], lineno, n_qubits)
            if qc == qt:
                raise ArityMismatch(lineno, "cnot needs two distinct qubits")
            ops.append(GateApp(GateKind.CNOT, (qc, qt), condition))
        elif head == "oracle":
            if "->" not in tokens:
                raise ArityMismatch(lineno, "usage: oracle <tt> q<i1> .. -> q<out>")
            arrow = tokens.index("->")
            if arrow < 3 or arrow != len(tokens) - 2:
                raise ArityMismatch(lineno, "usage: oracle <tt> q<i1> .. -> q<out>")
            tt = tokens[1]
            if not _TT_RE.match(tt):
                raise ArityMismatch(lineno, "truth table must be a string of 0s and 1s")
            inputs = tuple(_q_index(t, lineno, n_qubits) for t in tokens[2:arrow])
            output = _q_index(tokens[arrow + 1], lineno, n_qubits)
            if len(tt) != 1 << len(inputs):
                raise ArityMismatch(
                    lineno,
                    f"truth table has {len(tt)} entries but {len(inputs)} input(s) need {1 << len(inputs)}",
                )
            if len(set(inputs)) != len(inputs) or output in inputs:
                raise ArityMismatch(lineno, "oracle qubits must be distinct")
            ops.append(OracleApp(BooleanFunction.from_string(tt), inputs, output))
        elif head == "measure":
            if len(tokens) != 5 or tokens[3] != "->":
                raise ArityMismatch(lineno, "usage: measure q<i> X|Y|Z -> c<k>")
            q = _q_index(tokens[1], lineno, n_qubits)
            axis_token = tokens[2].upper()
            if axis_token not in ("X", "Y", "Z"):
                raise UnknownGate(lineno, f"unknown measurement axis {tokens[2]!r}")
            dest = _c_index(tokens[4], lineno, n_cbits)
            ops.append(Measure(q, PauliAxis(axis_token), dest))
            written.add(dest)
        else:
            raise UnknownGate(lineno, f"unknown operation {head!r}")

    if n_qubits is None:
        raise MalformedHeader(max(last_line, 1), "missing 'qubits <n>' header")
    return Circuit(n_qubits, n_cbits, tuple(ops))


def format_circuit(circuit: Circuit) -> str:
    """Canonical text for a circuit; parse_circuit inverts it exactly."""
    lines = [f"qubits {circuit.n_qubits}"]
    if circuit.n_cbits:
        lines.append(f"cbits {circuit.n_cbits}")
    for op in circuit.ops:
        if isinstance(op, GateApp):
            prefix = f"cif c{op.condition} " if op.condition is not None else ""
            lines.append(prefix + op.kind.value + "".join(f" q{t}" for t in op.targets))
        elif isinstance(op, OracleApp):
            qs = " ".join(f"q{t}" for t in op.inputs)
            lines.append(f"oracle {op.function.to_string()} {qs} -> q{op.output}")
        elif isinstance(op, Measure):
            lines.append(f"measure q{op.qubit} {op.axis.value} -> c{op.dest}")
        else:  # pragma: no cover - defensive
            raise TypeError(f"cannot format {op!r}")
    return "\n".join(lines) + "\n"
