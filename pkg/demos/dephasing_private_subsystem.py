# Two qubits under independent dephasing. No qubit-sized private subspace
# exists, but a private qubit survives as a subsystem once an ancilla in the
# maximally mixed state is attached.
import numpy as np

from qsubsys import channels, subsystems, privacy
from qsubsys.linops import trace_norm

lam = channels.dephasing_n(2)
u = channels.encoding_unitary_u()
print("Kraus operators of the dephasing channel:", len(lam.kraus))

# The encoding unitary swaps the relevant Pauli strings onto the second qubit.
for s, t in [("XX", "IY"), ("YI", "IZ"), ("ZX", "IX")]:
    ok = np.allclose(u @ channels.pauli(s) @ u.conj().T, channels.pauli(t))
    print(f"U {s} U^dag = {t}: {ok}")

# Rotated channel: the first qubit is the ancilla, the second carries the data.
lam_p = channels.dephasing_prime()
rng = np.random.default_rng(7)
half = np.eye(2) / 2
worst = 0.0
for _ in range(20):
    v = rng.normal(size=3)
    v *= rng.uniform() / np.linalg.norm(v)
    sb = (np.eye(2) + v[0] * channels.X + v[1] * channels.Y + v[2] * channels.Z) / 2
    worst = max(worst, trace_norm(channels.apply(lam_p, np.kron(half, sb)) - np.eye(4) / 4))
print("max distance to I/4 over 20 data states:", worst)

comp = subsystems.SubsystemDecomposition.computational(2, 2)
cert = privacy.is_private_subsystem(lam_p, comp, half)
print("private subsystem certificate:", cert.valid, "deviation", cert.max_deviation)

# A pure ancilla does not work.
pure = np.diag([1.0, 0.0])
print("with |0><0| ancilla:", privacy.is_private_subsystem(lam_p, comp, pure).valid)

# The same statement for the unrotated channel, with the inverse rotation as embedding.
dec = subsystems.SubsystemDecomposition(2, 2, u.conj().T)
print("original channel, rotated embedding:", privacy.is_private_subsystem(lam, dec, half).valid)

# Circuit version: encode with CNOTs and K, mix, dephase through CZ gates.
circ = subsystems.dephasing_privacy_circuit()
plus = np.ones(2) / np.sqrt(2)
for b in range(2):
    inp = np.kron(np.kron(np.kron(np.eye(2)[b], [1, 0]), plus), np.kron(plus, plus))
    rho = np.outer(inp, inp.conj())
    out = subsystems.run_circuit(circ, rho, [2] * 5, keep=[0, 1])
    print(f"|{b}> in, wires 1-2 out maximally mixed:", np.allclose(out, np.eye(4) / 4))
