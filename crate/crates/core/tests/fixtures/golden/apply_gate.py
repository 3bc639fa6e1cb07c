# Apply a quantum gate to an initial state and print the resulting state.
# Target framework: qiskit>=1.0
from qiskit import QuantumCircuit
from qiskit.quantum_info import Statevector

# Initial state amplitudes. The list index is little-endian:
# bit b of the index is the value of qubit b.
initial_state = Statevector([complex(1, 0), complex(0, 0)])

# A circuit holding only the requested gate.
qc = QuantumCircuit(1)
qc.h(0)

# Evolve the initial state through the circuit.
final_state = initial_state.evolve(qc)

# Print every non-negligible amplitude of the resulting state.
for index, amplitude in enumerate(final_state.data):
    if abs(amplitude) > 1e-10:
        label = format(index, "0{}b".format(qc.num_qubits))[::-1]
        print("|" + label + ">", complex(round(amplitude.real, 6), round(amplitude.imag, 6)))
