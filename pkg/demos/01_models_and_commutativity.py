"""
Curvature models and the commutativity check
============================================

Build a few 0-models, look at their Jacobi and Ricci operators, and decide
whether higher order Jacobi operators of complementary planes commute.
"""

import numpy as np

from pvmodels import (
    Model0,
    admissible_signatures,
    check_commuting_on_grassmannian,
    constant_curvature_model,
    grassmann_sample,
    higher_jacobi,
    is_puffini_videv,
    jacobi,
    make_space,
    orthogonal_complement,
    ricci,
    tensor_from_components,
)

# a Lorentzian space of constant curvature c = 2
space = make_space(1, 3)
model = constant_curvature_model(space, 2.0)
print("Ricci operator (should be c (m-1) = 6 times the identity):")
print(ricci(model))

# J(v) w = c(<v,v> w - <w,v> v)
v = np.array([0.5, 1.0, 0.0, 0.0])
print("Jacobi operator of a spacelike vector:")
print(np.round(jacobi(model, v), 3))

# the higher order Jacobi operators of a plane and its complement add up to rho
pi = grassmann_sample(space, (1, 1), seed=0)
perp = orthogonal_complement(space, pi)
print("| rho - J(pi) - J(pi_perp) | =", np.linalg.norm(ricci(model) - higher_jacobi(model, pi) - higher_jacobi(model, perp)))

# a model whose curvature couples distinct Ricci eigenlines
coupled = Model0(make_space(0, 3), tensor_from_components(3, [(0, 1, 1, 0, 1.0), (0, 2, 2, 0, 2.0)]))
print("Ricci eigenvalues:", np.linalg.eigvals(ricci(coupled)))

for m, name in [(model, "constant curvature"), (coupled, "coupled")]:
    det = is_puffini_videv(m)
    print(f"{name}: deterministic verdict {det.verdict} (scaled commutator {det.max_commutator_norm:.2e})")
    for sig in admissible_signatures(m.space):
        r = check_commuting_on_grassmannian(m, sig, n_samples=20, seed=1)
        print(f"   planes of signature {tuple(sig)}: {r.verdict} ({r.max_commutator_norm:.2e})")
