# A five-qubit repetition code with a fixed mixed ancilla.
#
# One logical bit is carried by wire 1 and copied onto an ancilla register
# prepared in a mixture of |0000> and the weight-one strings. Bit flips of
# total weight up to two are undone by majority vote.
import numpy as np

from qsubsys import qec
from qsubsys.channels import apply
from qsubsys.subsystems import embed

dec = qec.rep5_decomposition()
rec = qec.rep5_recovery()
rng = np.random.default_rng(3)

for p in (0.0, 0.1, 0.25):
    eps = rng.dirichlet(np.ones(6))
    rep = qec.genoqecc_verify(qec.rep5_error_map(eps), rec, dec, qec.rep5_ancilla(p))
    print(f"p={p:.2f}: corrected={rep.valid} max deviation {rep.max_deviation:.2e}")

# An ancilla with two flipped wires breaks the majority vote.
eps = rng.dirichlet(np.ones(6))
e = qec.rep5_error_map(eps)
bad = np.zeros((16, 16))
bad[0b1100, 0b1100] = 1
rep = qec.genoqecc_verify(e, rec, dec, bad)
print("ancilla |1100>: corrected =", rep.valid, "deviation", round(rep.max_deviation, 4))
print("expected 2*(eps3+eps4+eps5) =", round(2 * eps[3:].sum(), 4))

out = apply(rec, apply(e, embed(dec, bad, np.diag([1.0, 0.0]))))
mine = dec.embed.conj().T @ out @ dec.embed
print("two-branch prediction matches:", np.allclose(mine, qec.rep5_failure_output(eps)))

# Every ancilla eigenvector with nonzero weight gives an ordinary subspace code.
certs = qec.theorem3_extract(qec.rep5_error_map(eps), dec, qec.rep5_ancilla(0.1), rec)
print("subspace codes extracted:", len(certs), [round(c.residual, 12) for c in certs])
