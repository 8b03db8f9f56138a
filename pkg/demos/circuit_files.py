"""The circuit text format: write, parse, validate, run.

Shows a feedback circuit (measure one qubit, apply X to the other only
when the bit came up 1) going through the full text round trip, and the
automatic backend choice on it.
"""

from qsim import classify_gottesman_knill, dispatch_run, format_circuit, parse_circuit

SOURCE = """\
# entangle, measure the first qubit, then repair the second
qubits 2
cbits 2
h q0
cnot q0 q1
measure q0 Z -> c0
cif c0 x q1        # classical feedback
measure q1 Z -> c1
"""


def main():
    circuit = parse_circuit(SOURCE)
    print("parsed:", circuit.n_qubits, "qubits,", circuit.n_cbits, "cbits,",
          len(circuit.ops), "ops")

    verdict = classify_gottesman_knill(circuit)
    print("efficiently simulable fragment:", verdict.is_gk)

    print("\ncanonical form:")
    print(format_circuit(circuit))

    result = dispatch_run(circuit, 4000, seed=2)
    print(f"auto-dispatched to: {result.backend}")
    print("counts:", dict(sorted(result.counts.items())))
    print("\nthe feedback X means the second bit is always 0.")


if __name__ == "__main__":
    main()
