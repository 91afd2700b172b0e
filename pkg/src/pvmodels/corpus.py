"""Random model families used by the verification suites and demos."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .linalg import make_space
from .model import (
    AlgCurvTensor,
    Model0,
    change_basis,
    constant_curvature_model,
    curvature_tensor,
    direct_sum_many,
)


def gauss_tensor(psi):
    """``psi(x,w) psi(y,z) - psi(x,z) psi(y,w)`` for a symmetric form ``psi``."""
    psi = np.asarray(psi, dtype=float)
    return np.einsum("il,jk->ijkl", psi, psi) - np.einsum("ik,jl->ijkl", psi, psi)


def random_curvature_tensor(dim, rng, n_terms=3):
    """Random algebraic curvature tensor: signed sum of Gauss tensors of random symmetric forms."""
    a = np.zeros((dim,) * 4)
    for _ in range(n_terms):
        s = rng.standard_normal((dim, dim))
        a += rng.choice([-1.0, 1.0]) * gauss_tensor(0.5 * (s + s.T))
    return curvature_tensor(a / n_terms, project=True)


def null_pseudo_einstein_block(kappa):
    """Lorentzian 3-dim model whose Ricci operator is nilpotent with a 2x2 Jordan block.

    Basis ``(n, l, e)`` with ``n, l`` null, ``<n, l> = 1`` and ``e`` a unit
    spacelike vector. The tensor is ``kappa * omega (x) omega`` for the
    decomposable 2-form ``omega = n* ^ e*``; ``n`` lies in its kernel, which
    forces every Jacobi operator to commute with ``rho = kappa * n n*``.
    """
    g = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    n_flat = g @ np.array([1.0, 0.0, 0.0])
    e_flat = g @ np.array([0.0, 0.0, 1.0])
    omega = np.outer(n_flat, e_flat) - np.outer(e_flat, n_flat)
    a = kappa * np.einsum("ij,lk->ijkl", omega, omega)
    return Model0(make_space(1, 2, g), AlgCurvTensor(a))


def random_isometry(space, rng, scale=0.7):
    """A random map ``Q`` with ``Q^T G Q = G``."""
    s = rng.standard_normal((space.dim, space.dim)) * scale
    s = s - s.T
    # X = G^{-1} S with S antisymmetric satisfies X^T G + G X = 0
    return scipy.linalg.expm(space.gram_inverse @ s)


def apply_map(model, q):
    """Pull a model back along an invertible map (the columns of ``q`` become the new basis)."""
    return change_basis(model, q)


def random_basis_change(dim, rng, spread=0.3):
    return np.eye(dim) + spread * rng.standard_normal((dim, dim))


def _split(dim, rng, max_blocks=3):
    k = int(rng.integers(1, min(max_blocks, dim) + 1))
    cuts = np.sort(rng.choice(np.arange(1, dim), size=k - 1, replace=False)) if k > 1 else []
    sizes = np.diff(np.r_[0, cuts, dim]).astype(int)
    return [int(s) for s in sizes]


def einstein_sum(dim, lorentzian, rng, constants=None):
    """Direct sum of constant-curvature blocks; the first block carries the timelike direction."""
    sizes = _split(dim, rng)
    blocks = []
    for n, size in enumerate(sizes):
        p = 1 if (lorentzian and n == 0) else 0
        c = float(constants[n]) if constants is not None else float(rng.uniform(-3, 3))
        blocks.append(constant_curvature_model(make_space(p, size - p), c))
    return direct_sum_many(blocks), sizes


def perturbed(model, rng, size=None):
    size = float(rng.uniform(0.2, 1.0)) if size is None else size
    extra = random_curvature_tensor(model.dim, rng)
    return Model0(model.space, AlgCurvTensor(model.A + size * extra.entries))


def equivalence_corpus(n_models=200, seed=2024, dims=(3, 4, 5, 6)):
    """Half Puffini-Videv direct sums of Einstein blocks, half perturbed; random bases.

    Yields ``(model, is_pv_by_construction)``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n_models):
        dim = int(dims[k % len(dims)])
        lorentzian = bool((k // len(dims)) % 2)
        base, _ = einstein_sum(dim, lorentzian, rng)
        pv = k % 4 < 2
        model = base if pv else perturbed(base, rng)
        model = change_basis(model, random_basis_change(dim, rng))
        out.append((model, pv))
    return out
