"""Commutativity checks for higher order Jacobi operators and the Ricci block split."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import NotDecomposable, SignatureMismatch
from .linalg import (
    CLUSTER_TOL,
    Subspace,
    cluster_eigenvalues,
    grassmann_sample,
    is_admissible,
    orthogonal_complement,
    real_generalized_eigenspaces,
    subspace,
)
from .model import higher_jacobi_fast, jacobi_polarized, restrict, ricci

PV_TOL = 1e-8
SAMPLED_TOL = 1e-6
EINSTEIN_TOL = 1e-8
CROSS_TOL = 1e-8


@dataclass(frozen=True)
class PVReport:
    """Outcome of one commutativity criterion.

    ``max_commutator_norm`` is dimensionless: each commutator norm is divided
    by the scale it is compared against, so ``verdict`` is exactly
    ``max_commutator_norm < tolerance``.
    """

    verdict: bool
    criterion: int
    max_commutator_norm: float
    tolerance: float
    witness: Optional[object] = None
    n_samples: Optional[int] = None
    note: str = ""


def _scale(model, rho):
    return 1.0 + np.linalg.norm(rho) * model.tensor.max_abs


def is_puffini_videv(model, tol=PV_TOL):
    """Deterministic check that ``[rho, J(pi)] = 0`` for every nondegenerate plane.

    ``J(pi)`` is a ``xi^{ij}``-weighted sum of polarised Jacobi operators, so
    it suffices that ``rho`` commutes with ``J(e_i, e_j)`` for every pair of
    basis vectors. The witness is the 0-based pair ``(i, j)`` with the
    largest scaled commutator.
    """
    rho = ricci(model)
    scale = _scale(model, rho)
    eye = np.eye(model.dim)
    worst, witness = 0.0, None
    for i in range(model.dim):
        for j in range(i, model.dim):
            j_ij = jacobi_polarized(model, eye[i], eye[j])
            c = np.linalg.norm(rho @ j_ij - j_ij @ rho) / scale
            if witness is None or c > worst:
                worst, witness = float(c), (i, j)
    return PVReport(worst < tol, 3, worst, tol, witness)


def plane_commutator(model, pi, complement=None):
    """Scaled norm of ``J(pi) J(pi^perp) - J(pi^perp) J(pi)``."""
    if complement is None:
        complement = orthogonal_complement(model.space, pi)
    a = higher_jacobi_fast(model, pi.basis, pi.induced_gram_inverse)
    b = higher_jacobi_fast(model, complement.basis, complement.induced_gram_inverse)
    return float(np.linalg.norm(a @ b - b @ a) / (1.0 + np.linalg.norm(a) * np.linalg.norm(b)))


def check_commuting_on_grassmannian(model, sig, n_samples=50, seed=0, tol=SAMPLED_TOL):
    """Sample planes of signature ``sig`` and test ``[J(pi), J(pi^perp)] = 0``.

    The witness is the basis matrix of the worst sampled plane.
    """
    if not is_admissible(model.space, sig):
        raise SignatureMismatch(f"signature {tuple(sig)} is not admissible for ({model.space.p}, {model.space.q})")
    if n_samples <= 0:
        return PVReport(True, 1, 0.0, tol, None, 0, "no samples drawn; verdict is vacuous")
    seeds = np.random.SeedSequence(seed).spawn(n_samples)
    worst, witness = 0.0, None
    for ss in seeds:
        pi = grassmann_sample(model.space, sig, ss)
        c = plane_commutator(model, pi)
        if witness is None or c > worst:
            worst, witness = c, pi.basis
    return PVReport(worst < tol, 1, worst, tol, witness, n_samples)


@dataclass(frozen=True)
class Einstein:
    value: float


@dataclass(frozen=True)
class PseudoEinstein:
    """Ricci operator with a single real eigenvalue or a single conjugate pair."""

    value: complex
    eigenvalues: tuple = ()

    @property
    def is_pair(self):
        return self.value.imag != 0.0


@dataclass(frozen=True)
class Neither:
    """Ricci operator with at least two eigenvalue clusters; witness holds two cluster centres."""

    witness: tuple


Classification = Union[Einstein, PseudoEinstein, Neither]


def classify_ricci(rho, tol=EINSTEIN_TOL, cluster_tol=CLUSTER_TOL):
    """Classify a Ricci operator by its eigenstructure alone."""
    rho = np.asarray(rho, dtype=float)
    m = rho.shape[0]
    lam = np.trace(rho) / m
    if np.linalg.norm(rho - lam * np.eye(m)) < tol * (1.0 + np.linalg.norm(rho)):
        return Einstein(float(lam))
    eigs = np.linalg.eigvals(rho)
    clusters = cluster_eigenvalues(eigs, cluster_tol)
    centres = [complex(np.mean([complex(eigs[i].real, abs(eigs[i].imag)) for i in c])) for c in clusters]
    thresh = cluster_tol * (1.0 + np.max(np.abs(eigs)))
    centres = [complex(c.real, 0.0) if abs(c.imag) < thresh else c for c in centres]
    if len(clusters) == 1:
        return PseudoEinstein(centres[0], tuple(complex(e) for e in eigs))
    centres.sort(key=lambda c: (-c.real, -c.imag))
    return Neither((centres[0], centres[1]))


def classify_block(model, tol=EINSTEIN_TOL, cluster_tol=CLUSTER_TOL):
    """Einstein, PseudoEinstein or Neither, from the model's Ricci operator."""
    return classify_ricci(ricci(model), tol, cluster_tol)


def is_at_least_pseudo_einstein(cls):
    return isinstance(cls, (Einstein, PseudoEinstein))


@dataclass(frozen=True)
class Block:
    subspace: Subspace
    eigenvalue: complex
    classification: Classification

    @property
    def dim(self):
        return self.subspace.dim


@dataclass(frozen=True)
class BlockDecomposition:
    """Ricci eigenspace split of a model.

    ``cross_term_max`` is the largest curvature entry whose four basis vectors
    do not all lie in one block, and ``tolerance`` the threshold it was held
    to (``tol * (1 + max|A|)``). ``witness`` holds the first offending entry
    in lexicographic order of block-basis indices, entries of the form
    ``A(x_i, x_j, x_j, x_i)`` taking precedence.
    """

    blocks: tuple
    cross_term_max: float
    tolerance: float
    orthogonality_max: float
    witness: Optional[tuple] = None
    witness_value: float = 0.0
    witness_values: tuple = ()
    labels: tuple = field(default=(), repr=False)

    @property
    def valid(self):
        return self.cross_term_max < self.tolerance

    @property
    def basis(self):
        return np.column_stack([b.subspace.basis for b in self.blocks])

    @property
    def dims(self):
        return [b.dim for b in self.blocks]


def _block_tensor(model, blocks):
    p = np.column_stack([b.basis for b in blocks])
    labels = np.concatenate([[n] * b.dim for n, b in enumerate(blocks)])
    return model.tensor.change_basis(p), labels


def _cross_mask(labels):
    l1, l2, l3, l4 = np.ix_(labels, labels, labels, labels)
    return ~((l1 == l2) & (l2 == l3) & (l3 == l4))


def ricci_block_split(model, tol=CROSS_TOL, cluster_tol=CLUSTER_TOL, einstein_tol=EINSTEIN_TOL):
    """Split along the real generalized eigenspaces of ``rho`` without judging the result."""
    rho = ricci(model)
    eig_blocks = real_generalized_eigenspaces(rho, cluster_tol)
    a_blk, labels = _block_tensor(model, eig_blocks)
    scale = 1.0 + model.tensor.max_abs
    threshold = tol * scale
    cross = np.where(_cross_mask(labels), np.abs(a_blk), 0.0)
    cross_max = float(cross.max()) if cross.size else 0.0
    witness, witness_value, witness_values = None, 0.0, ()
    hits = np.argwhere(cross >= threshold)
    if len(hits):
        # prefer entries of Jacobi form A(x_i, x_j, x_j, x_i)
        jacobi_form = [h for h in hits if h[0] == h[3] and h[1] == h[2]]
        witness = tuple(int(i) for i in (jacobi_form[0] if jacobi_form else hits[0]))
        witness_value = float(a_blk[witness])
        witness_values = tuple(eig_blocks[labels[i]].value for i in witness)
    blocks = []
    for eb in eig_blocks:
        sub = subspace(model.space, eb.basis)
        cls = classify_block(restrict(model, eb.basis), einstein_tol, cluster_tol)
        blocks.append(Block(sub, eb.value, cls))
    g = model.space.gram
    ortho = 0.0
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            cross_g = blocks[i].subspace.basis.T @ g @ blocks[j].subspace.basis
            ortho = max(ortho, float(np.abs(cross_g).max()))
    return BlockDecomposition(
        tuple(blocks),
        cross_max,
        threshold,
        ortho,
        witness,
        witness_value,
        witness_values,
        tuple(int(x) for x in labels),
    )


def decompose_pv(model, tol=CROSS_TOL, cluster_tol=CLUSTER_TOL, einstein_tol=EINSTEIN_TOL):
    """Decompose a Puffini-Videv model into Ricci eigenspace blocks.

    Raises :class:`NotDecomposable` when curvature entries couple distinct
    blocks; the deterministic commutativity verdict is attached to the error.
    """
    dec = ricci_block_split(model, tol, cluster_tol, einstein_tol)
    if not dec.valid:
        report = is_puffini_videv(model)
        i, j, k, l = dec.witness
        raise NotDecomposable(
            f"A({i + 1},{j + 1},{k + 1},{l + 1}) = {dec.witness_value:.6g} couples Ricci eigenvalues "
            f"{', '.join(_fmt(v) for v in dec.witness_values)} (cross term max {dec.cross_term_max:.3e}); "
            f"deterministic commutativity check says the model is "
            f"{'Puffini-Videv' if report.verdict else 'not Puffini-Videv'}",
            dec.witness,
            dec.witness_value,
            dec.cross_term_max,
            report.verdict,
            dec,
        )
    return dec


def _fmt(v):
    v = complex(v)
    return f"{v.real:.6g}" if v.imag == 0 else f"{v.real:.6g}±{v.imag:.6g}i"


@dataclass(frozen=True)
class VanishingReport:
    """Largest violations of the two cross-block identities.

    ``swap_max``: ``|A(x1,x2,x3,x4) + A(x1,x3,x2,x4)|`` over tuples whose
    first and last vectors lie in different blocks. ``entry_max``:
    ``|A(x1,x2,x3,x4)|`` over tuples where additionally the second and last
    differ. ``n_swap`` and ``n_entry`` count qualifying tuples.
    """

    swap_max: float
    entry_max: float
    n_swap: int
    n_entry: int
    tolerance: float

    @property
    def passes(self):
        return self.swap_max < self.tolerance and self.entry_max < self.tolerance


def eq2d_vanishing_check(model, decomposition, tol=1e-12):
    """Measure the cross-block identities forced by commutativity with ``rho``."""
    p = decomposition.basis
    a = model.tensor.change_basis(p)
    lab = np.asarray(decomposition.labels)
    vals = np.array([decomposition.blocks[i].eigenvalue for i in lab])
    diff = np.abs(vals[:, None] - vals[None, :]) > 0
    m = len(lab)
    d14 = np.broadcast_to(diff[:, None, None, :], (m,) * 4)
    d24 = np.broadcast_to(diff[None, :, None, :], (m,) * 4)
    swap = np.abs(a + a.transpose(0, 2, 1, 3))
    entry_mask = d14 & d24
    swap_max = float(swap[d14].max()) if d14.any() else 0.0
    entry_max = float(np.abs(a)[entry_mask].max()) if entry_mask.any() else 0.0
    return VanishingReport(swap_max, entry_max, int(d14.sum()), int(entry_mask.sum()), tol)
