# Solve a travelling salesperson problem with a variational quantum eigensolver (VQE).
# Target framework: qiskit>=1.0 (also uses numpy and scipy)
import itertools

import numpy as np
from scipy.optimize import minimize
from qiskit import QuantumCircuit
from qiskit.circuit import ParameterVector
from qiskit.quantum_info import SparsePauliOp, Statevector

# Problem data. distances[i][j] is the cost of travelling from city i to city j.
cities = ["Aarau", "Bern", "Chur"]
distances = np.array([[0, 3, 4], [3, 0, 5], [4, 5, 0]], dtype=float)
penalty = 16
layers = 2
seed = 7
max_evals = 400
shots = 4096

n = len(cities)
num_vars = n * n


def var(city, position):
    # x[city, position] = 1 when the city is visited at that position of the tour.
    return city * n + position


# QUBO: each city takes one position, each position holds one city, plus tour length.
linear = np.zeros(num_vars)
quadratic = dict()
offset = 0.0


def add_quadratic(a, b, coeff):
    if a == b:
        linear[a] += coeff
        return
    key = (min(a, b), max(a, b))
    quadratic[key] = quadratic.get(key, 0.0) + coeff


rows = [[var(i, p) for p in range(n)] for i in range(n)]
cols = [[var(i, p) for i in range(n)] for p in range(n)]
for group in rows + cols:
    # penalty * (1 - sum(x))^2, using x^2 = x for binary x
    offset += penalty
    for a in group:
        linear[a] -= penalty
    for a, b in itertools.combinations(group, 2):
        add_quadratic(a, b, 2 * penalty)

for i in range(n):
    for j in range(n):
        if i != j:
            for p in range(n):
                # travelling from city i at position p to city j at position p + 1
                add_quadratic(var(i, p), var(j, (p + 1) % n), distances[i][j])

# Substitute x = (1 - z) / 2 to get an Ising Hamiltonian over Pauli Z operators.
terms = []
constant = offset
for a in range(num_vars):
    constant += linear[a] / 2
    terms.append(("Z", [a], -linear[a] / 2))
for (a, b), coeff in quadratic.items():
    constant += coeff / 4
    terms.append(("Z", [a], -coeff / 4))
    terms.append(("Z", [b], -coeff / 4))
    terms.append(("ZZ", [a, b], coeff / 4))
hamiltonian = SparsePauliOp.from_sparse_list(terms, num_qubits=num_vars).simplify()

# Hardware-efficient ansatz: RY rotation layers separated by rings of CZ gates.
if num_vars > 2:
    ring = [(q, (q + 1) % num_vars) for q in range(num_vars)]
else:
    ring = [(0, 1)]
thetas = ParameterVector("theta", num_vars * (layers + 1))
ansatz = QuantumCircuit(num_vars)
for layer in range(layers + 1):
    for q in range(num_vars):
        ansatz.ry(thetas[layer * num_vars + q], q)
    if layer < layers:
        for a, b in ring:
            ansatz.cz(a, b)


def energy(values):
    state = Statevector(ansatz.assign_parameters(values))
    return float(np.real(state.expectation_value(hamiltonian))) + constant


# Classical Nelder-Mead optimization of the circuit angles.
rng = np.random.default_rng(seed)
initial = rng.uniform(-np.pi, np.pi, len(thetas))
result = minimize(energy, initial, method="Nelder-Mead", options=dict(maxfev=max_evals))
print("Lowest energy found:", result.fun)


def decode(bits):
    grid = [[bits[var(i, p)] for p in range(n)] for i in range(n)]
    if any(sum(row) != 1 for row in grid):
        return None
    if any(sum(grid[i][p] for i in range(n)) != 1 for p in range(n)):
        return None
    order = [next(i for i in range(n) if grid[i][p]) for p in range(n)]
    cost = sum(distances[order[p]][order[(p + 1) % n]] for p in range(n))
    return order, cost


# Sample the optimized circuit; keep the cheapest valid tour among the 100 likeliest outcomes.
final = Statevector(ansatz.assign_parameters(result.x))
final.seed(seed)
counts = final.sample_counts(shots)
best = None
for key, _ in sorted(counts.items(), key=lambda kv: -kv[1])[:100]:
    bits = [int(key[num_vars - 1 - q]) for q in range(num_vars)]
    decoded = decode(bits)
    if decoded is not None and (best is None or decoded[1] < best[1]):
        best = decoded

if best is None:
    print("No valid tour among the sampled outcomes; retry with another seed or a larger penalty.")
else:
    order, cost = best
    print("Route:", " -> ".join(cities[c] for c in order + [order[0]]))
    print("Total distance:", cost)
