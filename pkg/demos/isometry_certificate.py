# Privacy through an isometry between Kraus families.
#
# When Lambda' maps every (1/2 I) x sigma_B to the same output, the two
# families {sqrt(p_k) K_j (|psi_k> x I)} and {sqrt(q_l) |phi_l><i|} span the
# same operators and are related by a matrix lambda with orthonormal columns.
import numpy as np

from qsubsys import channels, privacy
from qsubsys.subsystems import SubsystemDecomposition

lam_p = channels.dephasing_prime()
comp = SubsystemDecomposition.computational(2, 2)
cert = privacy.theorem2_certificate(lam_p, comp, np.eye(2) / 2)

np.set_printoptions(precision=3, suppress=True, linewidth=120)
print("lambda * sqrt(2):")
print((cert.lam * np.sqrt(2)).real)
print("residual", cert.residual, "unitary", cert.is_unitary)

# Operator privacy is stronger: it asks the ancilla to be arbitrary.
rep = privacy.is_operator_private(lam_p, comp)
print("operator private:", rep.valid)
if rep.witness is not None:
    print("witness ancilla operator:")
    print(rep.witness)
    print("deviation", rep.witness_deviation)

# The whole two-qubit space is not a private subspace, so its Gram test fails.
gram = privacy.subspace_gram_condition(lam_p, comp.projector())
print("full space as a private subspace passes the Gram test:", gram.consistent)
