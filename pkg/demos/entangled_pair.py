"""Prepare the two-qubit entangled pair on both backends and compare.

The circuit X(0) X(1) H(0) CNOT(0,1) lands on (|01> - |10>)/sqrt(2).
The dense backend tracks all four amplitudes; the tableau backend
tracks the two Pauli operators that fix the state, and can hand back
the same vector for small registers.
"""

import numpy as np

from qsim import (
    Measure,
    PauliAxis,
    Circuit,
    equal_up_to_global_phase,
    evolve,
    gk_entangler,
    run_stabilizer,
    run_statevector,
    to_statevector,
)


def show(label, state):
    kets = [f"|{i:02b}>" for i in range(4)]
    terms = [
        f"({a.real:+.4f}{a.imag:+.4f}j){k}"
        for a, k in zip(state.amps, kets)
        if abs(a) > 1e-12
    ]
    print(f"  {label}: " + " + ".join(terms))


def main():
    circuit = gk_entangler()
    dense = evolve(circuit)
    tableau = run_stabilizer(circuit, 1, seed=0, keep_final_state=True).final_state
    back = to_statevector(tableau)

    print("entangler state, two representations:")
    show("dense  ", dense)
    show("tableau", back)
    print(f"  equal up to global phase: {equal_up_to_global_phase(dense, back)}")

    measured = Circuit(
        2, 2, circuit.ops + (Measure(0, PauliAxis.Z, 0), Measure(1, PauliAxis.Z, 1))
    )
    print("\n2000 shots, same seed, both backends:")
    for name, backend in (("dense", run_statevector), ("tableau", run_stabilizer)):
        counts = backend(measured, 2000, seed=7).counts
        print(f"  {name:8s} {dict(sorted(counts.items()))}")
    print("\nthe qubits always disagree, and each bit alone is a fair coin.")


if __name__ == "__main__":
    main()
