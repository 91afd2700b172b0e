"""Signature-aware linear algebra.

Vectors are 1-d arrays and linear maps are square ``ndarray`` matrices acting
on column vectors in the working basis. A bilinear form is stored through its
Gram matrix ``G`` so that ``<x, y> = x @ G @ y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    ClusterAmbiguity,
    Degenerate,
    DimensionMismatch,
    SamplerExhausted,
    SignatureMismatch,
)

DEGENERACY_TOL = 1e-9
CLUSTER_TOL = 1e-6


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def inertia(matrix, tol=DEGENERACY_TOL):
    """Return ``(negative, positive)`` eigenvalue counts of a symmetric matrix.

    Raises :class:`Degenerate` if any eigenvalue is within ``tol`` (relative to
    the largest entry) of zero.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return (0, 0)
    w = np.linalg.eigvalsh(matrix)
    scale = max(np.abs(matrix).max(), np.finfo(float).tiny)
    if np.min(np.abs(w)) <= tol * scale:
        raise Degenerate(f"form is degenerate: smallest |eigenvalue| {np.min(np.abs(w)):.3e}")
    return int(np.sum(w < 0)), int(np.sum(w > 0))


@dataclass(frozen=True, eq=False)
class InnerProductSpace:
    """R^m with a nondegenerate symmetric form of signature ``(p, q)``.

    ``p`` counts negative (timelike) directions and ``q`` positive ones.
    """

    p: int
    q: int
    gram: np.ndarray
    gram_inverse: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.p + self.q

    @property
    def is_riemannian(self):
        return self.p == 0

    def inner(self, x, y):
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def check_vector(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected a vector of length {self.dim}, got shape {v.shape}")
        return v


def make_space(p, q, gram=None, tol=DEGENERACY_TOL):
    """Build an :class:`InnerProductSpace`.

    Without ``gram`` the form is ``diag(-1 (p times), +1 (q times))``.
    """
    p, q = int(p), int(q)
    if p < 0 or q < 0 or p + q < 1:
        raise SignatureMismatch(f"invalid signature ({p}, {q})")
    m = p + q
    if gram is None:
        g = np.diag(np.r_[-np.ones(p), np.ones(q)])
    else:
        g = np.array(gram, dtype=float)
        if g.shape != (m, m):
            raise SignatureMismatch(f"gram has shape {g.shape} but signature ({p}, {q}) needs {(m, m)}")
        if not np.array_equal(g, g.T):
            raise SignatureMismatch("gram matrix is not symmetric")
        got = inertia(g, tol)
        if got != (p, q):
            raise SignatureMismatch(f"gram has inertia {got}, expected ({p}, {q})")
    return InnerProductSpace(p, q, _frozen(g), _frozen(np.linalg.inv(g)))


class GrassmannSignature(NamedTuple):
    r: int
    s: int


@dataclass(frozen=True, eq=False)
class Subspace:
    """A nondegenerate k-plane given by the columns of ``basis`` (m x k)."""

    ambient: InnerProductSpace
    basis: np.ndarray
    induced_gram: np.ndarray
    induced_gram_inverse: np.ndarray
    signature: GrassmannSignature

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        """G-orthogonal projection onto the plane: ``B xi^{-1} B^T G``."""
        b = self.basis
        return b @ self.induced_gram_inverse @ b.T @ self.ambient.gram


def subspace(space, basis, tol=DEGENERACY_TOL):
    """Wrap the column span of ``basis`` as a :class:`Subspace`."""
    b = np.array(basis, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    m = space.dim
    if b.ndim != 2 or b.shape[0] != m:
        raise DimensionMismatch(f"basis must have {m} rows, got shape {b.shape}")
    k = b.shape[1]
    if not 1 <= k <= m:
        raise Degenerate(f"plane dimension {k} outside 1..{m}")
    sv = np.linalg.svd(b, compute_uv=False)
    if sv[-1] <= tol * sv[0]:
        raise Degenerate("basis vectors are linearly dependent")
    xi = b.T @ space.gram @ b
    xi = 0.5 * (xi + xi.T)
    r, s = inertia(xi, tol)
    xi_inv = np.linalg.inv(xi)
    return Subspace(space, _frozen(b), _frozen(xi), _frozen(xi_inv), GrassmannSignature(r, s))


def whole_space(space):
    return subspace(space, np.eye(space.dim))


def commutator(a, b):
    """``ab - ba``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"cannot commute shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def orthogonal_complement(space, pi, tol=DEGENERACY_TOL):
    """The G-orthogonal complement of a nondegenerate plane."""
    if pi.ambient is not space and pi.ambient.dim != space.dim:
        raise DimensionMismatch("plane lives in a different space")
    m, k = space.dim, pi.dim
    if k == m:
        raise Degenerate("complement of the whole space is the zero subspace")
    constraints = pi.basis.T @ space.gram
    # rank-revealing SVD; trailing right-singular vectors span the kernel
    _, sv, vt = np.linalg.svd(constraints)
    rank = int(np.sum(sv > tol * max(sv[0], np.finfo(float).tiny)))
    if rank != k:
        raise Degenerate(f"complement construction has rank {rank}, expected {k}")
    return subspace(space, vt[k:].T, tol)


def same_span_distance(a, b):
    """Distance between the Euclidean orthogonal projectors onto two column spans."""
    qa = scipy.linalg.orth(np.asarray(a, dtype=float))
    qb = scipy.linalg.orth(np.asarray(b, dtype=float))
    return float(np.linalg.norm(qa @ qa.T - qb @ qb.T))


@dataclass(frozen=True, eq=False)
class EigenBlock:
    """Real invariant subspace of one eigenvalue cluster.

    ``value`` is the cluster centre with non-negative imaginary part; a
    non-zero imaginary part means the block carries the pair ``value`` and its
    conjugate. ``eigenvalues`` lists all members that fell into the cluster.
    """

    value: complex
    eigenvalues: tuple
    basis: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def is_real(self):
        return self.value.imag == 0.0


def _canonical(lam):
    return complex(lam.real, abs(lam.imag))


def cluster_eigenvalues(eigs, tol=CLUSTER_TOL):
    """Single-linkage clustering of eigenvalues, conjugates identified.

    Two eigenvalues are linked when ``|a - b| < tol * (1 + max|eig|)``.
    Returns a list of index lists. Raises :class:`ClusterAmbiguity` when two
    separate clusters come within twice the linking threshold of each other.
    """
    eigs = np.asarray(eigs, dtype=complex)
    n = len(eigs)
    if n == 0:
        return []
    canon = np.array([_canonical(e) for e in eigs])
    thresh = tol * (1.0 + np.max(np.abs(eigs)))
    dist = np.abs(canon[:, None] - canon[None, :])
    labels = list(range(n))

    def find(i):
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] < thresh:
                labels[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            gap = dist[np.ix_(clusters[a], clusters[b])].min()
            if gap < 2 * thresh:
                raise ClusterAmbiguity(
                    f"eigenvalue clusters separated by {gap:.3e}, below twice the threshold {thresh:.3e}"
                )
    return clusters


def _leading_coordinate(basis):
    proj_diag = np.sum(basis**2, axis=1)
    return int(np.argmax(proj_diag > 0.5 * proj_diag.max()))


def _fix_signs(basis):
    out = basis.copy()
    for j in range(out.shape[1]):
        i = np.argmax(np.abs(out[:, j]))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


def real_generalized_eigenspaces(op, tol=CLUSTER_TOL):
    """Split R^m into real generalized eigenspaces of ``op``.

    Each returned :class:`EigenBlock` is the invariant subspace belonging to
    one eigenvalue cluster (a real value, or a conjugate pair). Bases are
    Euclidean-orthonormal Schur vectors; blocks are ordered by the first
    coordinate axis they lean on, which keeps diagonal inputs in their
    natural order.
    """
    op = np.asarray(op, dtype=float)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatch(f"operator must be square, got {op.shape}")
    eigs = np.linalg.eigvals(op)
    clusters = cluster_eigenvalues(eigs, tol)
    thresh = tol * (1.0 + np.max(np.abs(eigs)))
    blocks = []
    for members in clusters:
        centre = np.mean([_canonical(eigs[i]) for i in members])
        if abs(centre.imag) < thresh:
            centre = complex(centre.real, 0.0)
        k = len(members)
        if k == op.shape[0]:
            basis = np.eye(k)
        else:
            member_canon = np.array([_canonical(eigs[i]) for i in members])

            def select(re, im, member_canon=member_canon):
                return bool(np.min(np.abs(member_canon - complex(re, abs(im)))) < thresh)

            _, z, sdim = scipy.linalg.schur(op, output="real", sort=select)
            if sdim != k:
                raise ClusterAmbiguity(f"Schur reordering selected {sdim} eigenvalues, expected {k}")
            basis = z[:, :k]
        blocks.append(EigenBlock(centre, tuple(complex(eigs[i]) for i in sorted(members)), _fix_signs(basis)))
    blocks.sort(key=lambda b: (_leading_coordinate(b.basis), b.value.real, b.value.imag))
    return blocks


def admissible_signatures(space):
    """All ``(r, s)`` with ``0 <= r <= p``, ``0 <= s <= q``, ``1 <= r + s <= m - 1``."""
    m = space.dim
    return [
        GrassmannSignature(r, s)
        for r in range(space.p + 1)
        for s in range(space.q + 1)
        if 1 <= r + s <= m - 1
    ]


def is_admissible(space, sig):
    r, s = sig
    return 0 <= r <= space.p and 0 <= s <= space.q and 1 <= r + s <= space.dim - 1


def grassmann_sample(space, sig, seed, pivot_tol=1e-3, max_draws=None):
    """Draw a random nondegenerate plane of signature ``sig``.

    Gaussian vectors, drawn in a G-orthonormal frame so that acceptance
    rates do not depend on how skewed the working basis is, are
    G-orthogonalised against the vectors accepted so far; a draw is rejected
    when its pivot ``<w, w>`` is small compared with ``|w|^2`` or has a sign
    that is no longer needed. The returned basis is G-orthonormal. ``seed``
    may be anything ``numpy.random.default_rng`` accepts.
    """
    r, s = int(sig[0]), int(sig[1])
    if not (0 <= r <= space.p and 0 <= s <= space.q and r + s >= 1):
        raise SignatureMismatch(f"no ({r}, {s}) planes in a space of signature ({space.p}, {space.q})")
    rng = np.random.default_rng(seed)
    evals, evecs = np.linalg.eigh(space.gram)
    frame = evecs / np.sqrt(np.abs(evals))
    eta = np.sign(evals)
    k = r + s
    budget = max_draws if max_draws is not None else 200 * k
    need = {-1: r, 1: s}
    accepted = []
    norms = []
    draws = 0
    while len(accepted) < k:
        if draws >= budget:
            raise SamplerExhausted(f"no ({r}, {s}) plane found after {draws} draws")
        draws += 1
        w = rng.standard_normal(space.dim)
        for u, nu in zip(accepted, norms):
            w = w - (u @ (eta * w)) / nu * u
        pivot = w @ (eta * w)
        if abs(pivot) <= pivot_tol * (w @ w):
            continue
        sign = 1 if pivot > 0 else -1
        if need[sign] == 0:
            continue
        need[sign] -= 1
        u = w / np.sqrt(abs(pivot))
        accepted.append(u)
        norms.append(float(sign))
    accepted = [frame @ u for u in accepted]
    return subspace(space, np.column_stack(accepted))
