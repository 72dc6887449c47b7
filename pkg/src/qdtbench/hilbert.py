"""Finite-dimensional complex Hilbert space primitives.

States, subspaces with their meet/join/complement lattice, orthogonal
projection, and partial isometries (norm-preserving maps defined on a
subspace).  Everything is immutable and pure.  Subspaces are stored as
orthonormal bases but compared through projectors, which are gauge
independent; bases are produced by pivoted Householder QR so identical
inputs always canonicalize identically.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, OutsideDomain, ZeroState

# Tolerances.  Double precision leaves several orders of magnitude of
# headroom at the dimensions this package targets (d <= 64).
TOL_ORTH = 1e-9   # orthogonality, membership, subspace equality
TOL_NORM = 1e-9   # norm preservation / norm matching
TOL_RANK = 1e-9   # numerical rank decisions

#: how bases produced by :func:`orthonormalize` are canonicalized
CANONICAL_FORM = "householder-qr-column-pivoting"


def _as_complex_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    return m


class StateVector:
    """A vector in C^d.  Immutable, with cheap norm/dim accessors."""

    __slots__ = ("vec",)

    def __init__(self, components):
        vec = np.array(components, dtype=np.complex128).reshape(-1)
        if vec.size == 0:
            raise ValueError("a state vector needs at least one component")
        if not np.all(np.isfinite(vec)):
            raise ValueError("state vector has non-finite components")
        vec.setflags(write=False)
        self.vec = vec

    @property
    def dim(self) -> int:
        return self.vec.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    @property
    def is_unit(self) -> bool:
        return abs(self.norm - 1.0) <= TOL_NORM

    def unit(self) -> "StateVector":
        """Normalized copy; raises ZeroState below numerical resolution."""
        n = self.norm
        if n < 1e-12:
            raise ZeroState(f"cannot normalize a state of norm {n:.3e}")
        return StateVector(self.vec / n)

    def inner(self, other: "StateVector") -> complex:
        """<self|other>, conjugate-linear in self."""
        self._check_dim(other)
        return complex(np.vdot(self.vec, other.vec))

    def allclose(self, other: "StateVector", tol: float = TOL_ORTH) -> bool:
        self._check_dim(other)
        return bool(np.linalg.norm(self.vec - other.vec) <= tol)

    def _check_dim(self, other: "StateVector") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim} differ")

    def __add__(self, other: "StateVector") -> "StateVector":
        self._check_dim(other)
        return StateVector(self.vec + other.vec)

    def __sub__(self, other: "StateVector") -> "StateVector":
        self._check_dim(other)
        return StateVector(self.vec - other.vec)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.vec * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim}, norm={self.norm:.6g})"


def basis_state(dim: int, index: int) -> StateVector:
    """The standard basis vector e_index of C^dim."""
    if not 0 <= index < dim:
        raise ValueError(f"index {index} outside [0, {dim})")
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return StateVector(v)


def _orthonormal_columns(a: np.ndarray, tol: float = TOL_RANK) -> np.ndarray:
    """Orthonormal basis of the column span, rank decided at `tol`.

    Pivoted QR: deterministic for a fixed input matrix, and the pivot
    ordering makes the rank cut stable when columns differ wildly in
    norm.
    """
    d, k = a.shape
    if k == 0:
        return a.copy()
    q, r, _ = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol))
    return np.ascontiguousarray(q[:, :rank])


class Subspace:
    """A subspace of C^d held as an orthonormal basis (d x k matrix).

    The zero subspace (k = 0) is a first-class value.  Equality is
    projector equality, so two Subspace objects built from different
    generating sets of the same span compare equal.
    """

    __slots__ = ("basis", "_proj")

    def __init__(self, basis):
        b = _as_complex_matrix(basis)
        d, k = b.shape
        if d == 0:
            raise ValueError("ambient dimension must be positive")
        if k > d:
            raise ValueError(f"{k} basis vectors cannot be independent in C^{d}")
        if k > 0:
            gram = b.conj().T @ b
            if np.max(np.abs(gram - np.eye(k))) > TOL_ORTH:
                raise ValueError("basis columns are not orthonormal; "
                                 "use orthonormalize() for raw spans")
        b.setflags(write=False)
        self.basis = b
        self._proj = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim))

    @classmethod
    def span_of_basis_states(cls, ambient_dim: int, indices: Sequence[int]) -> "Subspace":
        cols = np.zeros((ambient_dim, len(indices)), dtype=np.complex128)
        for j, i in enumerate(indices):
            cols[i, j] = 1.0
        return cls(cols)

    # -- accessors --------------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def canonical_form(self) -> str:
        return CANONICAL_FORM

    def projector(self) -> np.ndarray:
        if self._proj is None:
            p = self.basis @ self.basis.conj().T
            p.setflags(write=False)
            self._proj = p
        return self._proj

    # -- predicates -------------------------------------------------------

    def contains(self, psi: StateVector, tol: float = TOL_ORTH) -> bool:
        """Whether psi lies in the subspace up to a residual of norm tol."""
        if psi.dim != self.ambient_dim:
            raise DimensionMismatch(
                f"state dim {psi.dim} vs ambient {self.ambient_dim}")
        residual = psi.vec - self.basis @ (self.basis.conj().T @ psi.vec)
        return bool(np.linalg.norm(residual) <= tol)

    def contains_subspace(self, other: "Subspace", tol: float = TOL_ORTH) -> bool:
        self._check_ambient(other)
        if other.is_zero:
            return True
        res = other.basis - self.basis @ (self.basis.conj().T @ other.basis)
        return bool(np.max(np.linalg.norm(res, axis=0)) <= tol)

    def equals(self, other: "Subspace", tol: float = TOL_ORTH) -> bool:
        self._check_ambient(other)
        return bool(np.max(np.abs(self.projector() - other.projector())) <= tol)

    def orthogonal_to(self, other: "Subspace", tol: float = TOL_ORTH) -> bool:
        self._check_ambient(other)
        if self.is_zero or other.is_zero:
            return True
        return bool(np.max(np.abs(self.basis.conj().T @ other.basis)) <= tol)

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dims {self.ambient_dim} and {other.ambient_dim} differ")

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def orthonormalize(vectors, tol: float = TOL_RANK) -> Subspace:
    """Subspace spanned by `vectors` (StateVectors or a d x k matrix).

    Numerical rank is decided at `tol`; a list of dependent or zero
    vectors simply yields a lower-dimensional (possibly zero) subspace.
    """
    if isinstance(vectors, np.ndarray):
        mat = _as_complex_matrix(vectors)
    else:
        vs = list(vectors)
        if not vs:
            raise ValueError("cannot infer ambient dimension from an empty list; "
                             "use Subspace.zero(dim)")
        dims = {v.dim for v in vs}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed ambient dimensions {sorted(dims)}")
        mat = np.column_stack([v.vec for v in vs])
    return Subspace(_orthonormal_columns(mat, tol))


def project(subspace: Subspace, psi: StateVector) -> StateVector:
    """Orthogonal projection of psi onto the subspace."""
    if psi.dim != subspace.ambient_dim:
        raise DimensionMismatch(
            f"state dim {psi.dim} vs ambient {subspace.ambient_dim}")
    b = subspace.basis
    return StateVector(b @ (b.conj().T @ psi.vec))


# -- lattice operations ---------------------------------------------------

def join(e: Subspace, f: Subspace) -> Subspace:
    """Closed span of the union (the lattice join)."""
    e._check_ambient(f)
    return Subspace(_orthonormal_columns(np.hstack([e.basis, f.basis])))


def complement(e: Subspace) -> Subspace:
    """Orthogonal complement."""
    d = e.ambient_dim
    if e.is_zero:
        return Subspace.full(d)
    if e.dim == d:
        return Subspace.zero(d)
    # rows of basis^H are orthonormal, so the null space is numerically clean
    n = scipy.linalg.null_space(e.basis.conj().T)
    return Subspace(n)


def meet(e: Subspace, f: Subspace) -> Subspace:
    """Intersection, computed through the complement of the joined complements."""
    e._check_ambient(f)
    return complement(join(complement(e), complement(f)))


def lattice(kind: str, e: Subspace, f: Subspace | None = None) -> Subspace:
    """Dispatch on kind in {"meet", "join", "complement"}."""
    if kind == "complement":
        return complement(e)
    if f is None:
        raise ValueError(f"lattice kind {kind!r} needs two subspaces")
    if kind == "meet":
        return meet(e, f)
    if kind == "join":
        return join(e, f)
    raise ValueError(f"unknown lattice operation {kind!r}")


# -- partial isometries ----------------------------------------------------

class PartialIsometryAct:
    """A norm-preserving linear map defined on a domain subspace.

    `matrix` holds the images of the domain's stored basis vectors in
    ambient coordinates, so it has shape (ambient_dim, domain.dim) and
    orthonormal columns.  Acts are immutable; `label` is an optional
    catalog tag and plays no algebraic role.
    """

    __slots__ = ("domain", "matrix", "label")

    def __init__(self, domain: Subspace, matrix, label: str | None = None):
        m = _as_complex_matrix(matrix)
        if domain.dim == 0:
            raise ValueError("acts on the zero subspace are not defined")
        if m.shape != (domain.ambient_dim, domain.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match domain "
                f"({domain.ambient_dim} x {domain.dim})")
        gram = m.conj().T @ m
        defect = float(np.max(np.abs(gram - np.eye(domain.dim))))
        if defect > TOL_ORTH:
            raise ValueError(
                f"not an isometry: column gram defect {defect:.3e}")
        m.setflags(write=False)
        self.domain = domain
        self.matrix = m
        self.label = label

    def apply(self, psi: StateVector, tol: float = TOL_ORTH) -> StateVector:
        """Image of psi; psi must lie in the domain up to `tol`."""
        if psi.dim != self.domain.ambient_dim:
            raise DimensionMismatch(
                f"state dim {psi.dim} vs ambient {self.domain.ambient_dim}")
        b = self.domain.basis
        coords = b.conj().T @ psi.vec
        residual = float(np.linalg.norm(psi.vec - b @ coords))
        if residual > tol:
            raise OutsideDomain(
                f"state lies {residual:.3e} outside the act's domain")
        return StateVector(self.matrix @ coords)

    def as_operator(self) -> np.ndarray:
        """Ambient d x d matrix: the act on its domain, zero on the complement."""
        return self.matrix @ self.domain.basis.conj().T

    def range_subspace(self) -> Subspace:
        return Subspace(self.matrix.copy())

    def with_label(self, label: str) -> "PartialIsometryAct":
        return PartialIsometryAct(self.domain, self.matrix, label=label)

    def __repr__(self) -> str:
        tag = f", label={self.label!r}" if self.label else ""
        return (f"PartialIsometryAct(domain_dim={self.domain.dim}, "
                f"ambient={self.domain.ambient_dim}{tag})")


def apply_act(act: PartialIsometryAct, psi: StateVector,
              tol: float = TOL_ORTH) -> StateVector:
    return act.apply(psi, tol=tol)


def acts_equal(u: PartialIsometryAct, v: PartialIsometryAct,
               tol: float = TOL_ORTH) -> bool:
    """Same domain (as a subspace) and same action on it."""
    if u.domain.ambient_dim != v.domain.ambient_dim:
        raise DimensionMismatch("acts live in different ambient spaces")
    if not u.domain.equals(v.domain, tol):
        return False
    return bool(np.max(np.abs(u.as_operator() - v.as_operator())) <= tol)


def acts_agree_on(u: PartialIsometryAct, v: PartialIsometryAct,
                  sub: Subspace, tol: float = TOL_ORTH) -> bool:
    """Whether u and v act identically on a common subspace of their domains."""
    if sub.is_zero:
        return True
    diff = (u.as_operator() - v.as_operator()) @ sub.basis
    return bool(np.max(np.linalg.norm(diff, axis=0)) <= tol)
