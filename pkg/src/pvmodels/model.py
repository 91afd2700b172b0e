"""Algebraic curvature tensors, 0-models and their Jacobi-type operators.

Tensors are dense ``(m, m, m, m)`` arrays with ``A[i, j, k, l] = A(e_i, e_j,
e_k, e_l)``. Operators defined through a pairing ``<T w, u> = B(w, u)`` are
materialised as ``T = G^{-1} B^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
import scipy.linalg

from .errors import BianchiViolation, DimensionMismatch, SymmetryConflict
from .linalg import InnerProductSpace, make_space, subspace

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class SymmetryReport:
    antisymmetry: float
    pair_symmetry: float
    bianchi: float

    @property
    def worst(self):
        return max(self.antisymmetry, self.pair_symmetry, self.bianchi)

    def passes(self, tol=SYMMETRY_TOL):
        return self.worst < tol


def symmetry_violations(entries):
    a = np.asarray(entries, dtype=float)
    if a.size == 0:
        return SymmetryReport(0.0, 0.0, 0.0)
    anti = np.abs(a + a.transpose(1, 0, 2, 3)).max()
    pair = np.abs(a - a.transpose(2, 3, 0, 1)).max()
    bianchi = np.abs(a + a.transpose(1, 2, 0, 3) + a.transpose(2, 0, 1, 3)).max()
    return SymmetryReport(float(anti), float(pair), float(bianchi))


def _perm_sign(perm):
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


_ALT_TERMS = [(perm, _perm_sign(perm)) for perm in permutations(range(4))]


def project_to_curvature(entries):
    """Orthogonal projection onto the space of algebraic curvature tensors.

    Averages over the pair/antisymmetry group, then removes the totally
    antisymmetric part (the only obstruction to the Bianchi identity).
    """
    a = np.asarray(entries, dtype=float)
    s = (
        a
        - a.transpose(1, 0, 2, 3)
        - a.transpose(0, 1, 3, 2)
        + a.transpose(1, 0, 3, 2)
    ) / 4.0
    s = 0.5 * (s + s.transpose(2, 3, 0, 1))
    alt = sum(sign * s.transpose(perm) for perm, sign in _ALT_TERMS) / 24.0
    return s - alt


@dataclass(frozen=True, eq=False)
class AlgCurvTensor:
    """Dense 4-tensor satisfying the symmetries of a Riemann tensor."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 4 or len(set(a.shape)) != 1:
            raise DimensionMismatch(f"curvature tensor needs shape (m, m, m, m), got {a.shape}")
        report = symmetry_violations(a)
        scale = max(1.0, np.abs(a).max()) if a.size else 1.0
        if report.antisymmetry >= SYMMETRY_TOL * scale or report.pair_symmetry >= SYMMETRY_TOL * scale:
            raise SymmetryConflict(f"tensor violates curvature symmetries: {report}")
        if report.bianchi >= SYMMETRY_TOL * scale:
            raise BianchiViolation(f"tensor violates the first Bianchi identity by {report.bianchi:.3e}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def max_abs(self):
        return float(np.abs(self.entries).max()) if self.entries.size else 0.0

    def __call__(self, v1, v2, v3, v4):
        return float(np.einsum("abcd,a,b,c,d->", self.entries, v1, v2, v3, v4))

    def change_basis(self, p):
        """Components in the basis given by the columns of ``p``."""
        p = np.asarray(p, dtype=float)
        return np.einsum("abcd,ai,bj,ck,dl->ijkl", self.entries, p, p, p, p, optimize=True)


def curvature_tensor(entries, project=False):
    """Wrap an array as :class:`AlgCurvTensor`, optionally projecting roundoff away first."""
    a = np.asarray(entries, dtype=float)
    if project:
        a = project_to_curvature(a)
    return AlgCurvTensor(a)


def zero_tensor(dim):
    return AlgCurvTensor(np.zeros((dim,) * 4))


def tensor_from_components(dim, generators, tol=SYMMETRY_TOL):
    """Complete a list of ``(i, j, k, l, value)`` generators by symmetry.

    Indices are 0-based. Every generator fixes its 8 images under the
    antisymmetries and the pair symmetry; unset slots stay zero.
    """
    a = np.zeros((dim,) * 4)
    set_ = np.zeros((dim,) * 4, dtype=bool)
    for gen in generators:
        i, j, k, l, value = gen
        idx = (int(i), int(j), int(k), int(l))
        if any(not 0 <= x < dim for x in idx):
            raise DimensionMismatch(f"index {idx} out of range for dimension {dim}")
        i, j, k, l = idx
        images = [
            ((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1),
            ((k, l, i, j), 1), ((l, k, i, j), -1), ((k, l, j, i), -1), ((l, k, j, i), 1),
        ]
        for slot, sign in images:
            v = sign * float(value)
            if slot[0] == slot[1] or slot[2] == slot[3]:
                if abs(v) > tol:
                    raise SymmetryConflict(f"generator {gen} forces a nonzero entry on a repeated antisymmetric pair")
                continue
            if set_[slot] and abs(a[slot] - v) > tol * max(1.0, abs(v)):
                raise SymmetryConflict(f"slot {slot} receives both {a[slot]} and {v}")
            a[slot] = v
            set_[slot] = True
    report = symmetry_violations(a)
    if report.bianchi >= tol * max(1.0, np.abs(a).max() if a.size else 0.0):
        raise BianchiViolation(f"completed tensor violates the first Bianchi identity by {report.bianchi:.3e}")
    return AlgCurvTensor(a)


def validate_symmetries(t):
    """Max violation of antisymmetry, pair symmetry and Bianchi for a tensor or raw array."""
    entries = t.entries if isinstance(t, AlgCurvTensor) else t
    return symmetry_violations(entries)


@dataclass(frozen=True, eq=False)
class Model0:
    space: InnerProductSpace
    tensor: AlgCurvTensor

    def __post_init__(self):
        if self.space.dim != self.tensor.dim:
            raise DimensionMismatch(f"space of dimension {self.space.dim} with tensor of dimension {self.tensor.dim}")

    @property
    def dim(self):
        return self.space.dim

    @property
    def A(self):
        return self.tensor.entries


def constant_curvature_tensor(gram, c):
    g = np.asarray(gram, dtype=float)
    # A(x,y,z,w) = c(<x,w><y,z> - <x,z><y,w>)
    a = c * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))
    return AlgCurvTensor(a)


def constant_curvature_model(space, c):
    return Model0(space, constant_curvature_tensor(space.gram, c))


def direct_sum(a, b):
    """Orthogonal direct sum; the first factor occupies the leading indices."""
    m1, m2 = a.dim, b.dim
    m = m1 + m2
    g = scipy.linalg.block_diag(a.space.gram, b.space.gram)
    t = np.zeros((m,) * 4)
    t[:m1, :m1, :m1, :m1] = a.A
    t[m1:, m1:, m1:, m1:] = b.A
    return Model0(make_space(a.space.p + b.space.p, a.space.q + b.space.q, g), AlgCurvTensor(t))


def direct_sum_many(models):
    out = models[0]
    for nxt in models[1:]:
        out = direct_sum(out, nxt)
    return out


def change_basis(model, p):
    """Re-express a model in the basis formed by the columns of ``p``."""
    p = np.asarray(p, dtype=float)
    g = p.T @ model.space.gram @ p
    g = 0.5 * (g + g.T)
    space = make_space(model.space.p, model.space.q, g)
    return Model0(space, curvature_tensor(model.tensor.change_basis(p), project=True))


def restrict(model, basis):
    """Sub-model on the span of ``basis`` (form and tensor pulled back)."""
    sub = subspace(model.space, basis)
    g = sub.induced_gram
    t = curvature_tensor(model.tensor.change_basis(sub.basis), project=True)
    return Model0(make_space(sub.signature.r, sub.signature.s, g), t)


def _operator(space, form):
    # <T w, u> = form[w, u]  =>  G T = form^T
    return np.linalg.solve(space.gram, np.asarray(form).T)


def curvature_operator(m, v1, v2):
    """``A(v1, v2)`` with ``<A(v1, v2) v3, v4> = A(v1, v2, v3, v4)``."""
    v1 = m.space.check_vector(v1)
    v2 = m.space.check_vector(v2)
    return _operator(m.space, np.einsum("abcd,a,b->cd", m.A, v1, v2))


def jacobi(m, v):
    """Jacobi operator: ``<J(v) w, u> = A(w, v, v, u)``."""
    v = m.space.check_vector(v)
    return _operator(m.space, np.einsum("abcd,b,c->ad", m.A, v, v))


def jacobi_polarized(m, v1, v2):
    """Symmetric bilinear polarisation ``(J(v1 + v2) - J(v1) - J(v2)) / 2``."""
    v1 = m.space.check_vector(v1)
    v2 = m.space.check_vector(v2)
    return 0.5 * (jacobi(m, v1 + v2) - jacobi(m, v1) - jacobi(m, v2))


def higher_jacobi(m, pi):
    """Higher order Jacobi operator of a nondegenerate plane.

    Sums ``xi^{ij} J(v_i, v_j)`` over the plane's stored basis, where ``xi``
    is the induced Gram matrix.
    """
    if pi.ambient.dim != m.dim:
        raise DimensionMismatch("plane and model live in different dimensions")
    b = pi.basis
    xi_inv = pi.induced_gram_inverse
    out = np.zeros((m.dim, m.dim))
    for i in range(pi.dim):
        for j in range(pi.dim):
            if xi_inv[i, j] != 0.0:
                out += xi_inv[i, j] * jacobi_polarized(m, b[:, i], b[:, j])
    return out


def higher_jacobi_fast(m, basis, xi_inv):
    """Contracted form of :func:`higher_jacobi` for hot loops."""
    weight = basis @ xi_inv @ basis.T
    return _operator(m.space, np.einsum("abcd,bc->ad", m.A, weight))


def ricci(m):
    """Ricci operator ``y -> sum g^{ij} A(y, e_i) e_j``."""
    return _operator(m.space, np.einsum("aijd,ij->ad", m.A, m.space.gram_inverse))


def ricci_form(m):
    return np.einsum("aijd,ij->ad", m.A, m.space.gram_inverse)


def scalar_curvature_of_model(m):
    """``tau = sum g^{jk} g^{il} A_{ijkl}``."""
    gi = m.space.gram_inverse
    return float(np.einsum("ijkl,jk,il->", m.A, gi, gi))


def curvature_range(m, tol=1e-9):
    """Euclidean-orthonormal basis of span{A(e_i, e_j) e_k}, or ``None`` for a zero tensor."""
    n = m.dim
    vectors = np.linalg.solve(m.space.gram, m.A.reshape(n**3, n).T)
    if not np.any(vectors):
        return None
    u, sv, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(sv > tol * sv[0]))
    if rank == 0:
        return None
    return u[:, :rank]
