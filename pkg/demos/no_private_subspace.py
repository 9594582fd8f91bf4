# Two-qubit dephasing is a mixed unitary channel with commuting Kraus
# operators. Such channels have no private subspaces, which a random search
# over two-dimensional subspaces corroborates: the best spread of outputs
# stays far from zero.
import time

from qsubsys import channels, privacy

lam = channels.dephasing_n(2)
rep = privacy.theorem1_structure_check(lam)
print("mixed unitary:", rep.mixed_unitary, "commuting:", rep.commuting)
print("private subspaces excluded:", rep.excludes_private_subspaces)

start = time.perf_counter()
res = privacy.search_private_subspace(lam, 2, restarts=10_000, seed=42)
print(f"best value {res.best_value:.4f} after {res.restarts} restarts in {time.perf_counter() - start:.1f}s")
print("found private subspace:", res.found)
