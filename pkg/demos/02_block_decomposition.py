"""
Splitting a model along Ricci eigenspaces
=========================================

A commuting model breaks into blocks on which the Ricci operator has a
single eigenvalue (or a conjugate pair). Hide a direct sum behind a random
isometry and recover the pieces.
"""

import numpy as np

from pvmodels import NotDecomposable, decompose_pv, make_space
from pvmodels.corpus import null_pseudo_einstein_block, random_isometry
from pvmodels.model import change_basis, constant_curvature_model, direct_sum_many, restrict

rng = np.random.default_rng(3)

# Riemannian: three Einstein blocks with eigenvalues 1*(2-1), -2*(3-1), 3*(2-1)
blocks = [
    constant_curvature_model(make_space(0, 2), 1.0),
    constant_curvature_model(make_space(0, 3), -2.0),
    constant_curvature_model(make_space(0, 2), 3.0),
]
model = direct_sum_many(blocks)
hidden = change_basis(model, random_isometry(model.space, rng))

dec = decompose_pv(hidden)
print("block dims:", dec.dims)
for b in dec.blocks:
    print(f"  eigenvalue {b.eigenvalue.real:+.12f}  ->  {b.classification}")
print("largest cross-block curvature entry:", dec.cross_term_max)

# Lorentzian: a block whose Ricci operator is nilpotent (not diagonalisable)
null = null_pseudo_einstein_block(1.5)
lor = direct_sum_many([null, constant_curvature_model(make_space(0, 2), 2.0)])
lor = change_basis(lor, random_isometry(lor.space, rng, scale=0.4))
for b in decompose_pv(lor).blocks:
    print(f"Lorentzian block of dim {b.dim}, signature {tuple(b.subspace.signature)}: {type(b.classification).__name__}")

# the nilpotent block really has a 2x2 Jordan block
from pvmodels import ricci

rho = ricci(null)
print("rho of the null block:\n", rho, "\nrho^2 =", np.abs(rho @ rho).max())

# a non-commuting model cannot be split
from pvmodels import Model0, tensor_from_components

bad = Model0(make_space(0, 3), tensor_from_components(3, [(0, 1, 1, 0, 1.0), (0, 2, 2, 0, 2.0)]))
try:
    decompose_pv(bad)
except NotDecomposable as err:
    print("NotDecomposable:", err)
