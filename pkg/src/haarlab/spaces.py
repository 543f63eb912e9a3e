"""Finite-dimensional spaces with l1/l2/linf norms and operators between them."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError


class Norm(str, Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


@dataclass(frozen=True)
class NormedSpaceSpec:
    dim: int
    norm: Norm

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"space dimension must be >= 1, got {self.dim}")
        if not isinstance(self.norm, Norm):
            object.__setattr__(self, "norm", Norm(self.norm))

    def norm_of(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=float)
        if self.norm is Norm.L1:
            return float(np.abs(v).sum())
        if self.norm is Norm.L2:
            return float(np.sqrt(v @ v))
        return float(np.abs(v).max()) if v.size else 0.0

    def norms_of(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if self.norm is Norm.L1:
            return np.abs(rows).sum(axis=1)
        if self.norm is Norm.L2:
            return np.sqrt((rows * rows).sum(axis=1))
        return np.abs(rows).max(axis=1)

    def dual_vector(self, v: np.ndarray) -> np.ndarray:
        """A subgradient of the norm at v; ties and zeros resolve to zero."""
        v = np.asarray(v, dtype=float)
        if self.norm is Norm.L1:
            return np.sign(v)
        if self.norm is Norm.L2:
            nv = self.norm_of(v)
            return v / nv if nv > 0 else np.zeros_like(v)
        out = np.zeros_like(v)
        if np.any(v != 0):
            pos = int(np.argmax(np.abs(v)))
            out[pos] = np.sign(v[pos])
        return out

    def dual_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if self.norm is Norm.L1:
            return np.sign(rows)
        if self.norm is Norm.L2:
            norms = self.norms_of(rows)
            safe = np.where(norms > 0, norms, 1.0)
            return rows / safe[:, None]
        out = np.zeros_like(rows)
        nonzero = np.any(rows != 0, axis=1)
        if np.any(nonzero):
            pos = np.argmax(np.abs(rows), axis=1)
            sel = np.flatnonzero(nonzero)
            out[sel, pos[sel]] = np.sign(rows[sel, pos[sel]])
        return out


class OperatorKind(str, Enum):
    IDENTITY = "identity"
    DIAGONAL = "diagonal"
    DENSE = "dense"


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    kind: OperatorKind
    domain: NormedSpaceSpec
    codomain: NormedSpaceSpec
    matrix: np.ndarray | None = None
    entries: np.ndarray | None = None

    def __post_init__(self):
        if not isinstance(self.kind, OperatorKind):
            object.__setattr__(self, "kind", OperatorKind(self.kind))
        if self.kind is OperatorKind.DENSE:
            if self.matrix is None:
                raise DomainError("dense operator requires a matrix")
            m = np.asarray(self.matrix, dtype=float)
            if m.shape != (self.codomain.dim, self.domain.dim):
                raise DomainError(
                    f"matrix shape {m.shape} does not match codomain x domain "
                    f"({self.codomain.dim}, {self.domain.dim})"
                )
            object.__setattr__(self, "matrix", m)
        elif self.kind is OperatorKind.DIAGONAL:
            if self.entries is None:
                raise DomainError("diagonal operator requires entries")
            e = np.asarray(self.entries, dtype=float)
            if self.domain.dim != self.codomain.dim:
                raise DomainError("diagonal operator requires equal dimensions")
            if e.shape != (self.domain.dim,):
                raise DomainError(
                    f"diagonal entries shape {e.shape} does not match dim {self.domain.dim}"
                )
            object.__setattr__(self, "entries", e)
        else:
            if self.domain.dim != self.codomain.dim:
                raise DomainError("identity operator requires equal dimensions")

    @classmethod
    def identity(cls, space: NormedSpaceSpec) -> "OperatorSpec":
        return cls(OperatorKind.IDENTITY, space, space)

    @classmethod
    def diagonal(cls, entries, norm: Norm) -> "OperatorSpec":
        e = np.asarray(entries, dtype=float)
        space = NormedSpaceSpec(len(e), norm)
        return cls(OperatorKind.DIAGONAL, space, space, entries=e)

    @classmethod
    def dense(cls, matrix, domain: NormedSpaceSpec, codomain: NormedSpaceSpec) -> "OperatorSpec":
        return cls(OperatorKind.DENSE, domain, codomain, matrix=np.asarray(matrix, dtype=float))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind is OperatorKind.IDENTITY:
            return x.copy()
        if self.kind is OperatorKind.DIAGONAL:
            return self.entries * x
        return self.matrix @ x

    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if self.kind is OperatorKind.IDENTITY:
            return rows.copy()
        if self.kind is OperatorKind.DIAGONAL:
            return rows * self.entries
        return rows @ self.matrix.T

    def transpose_apply_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        if self.kind is OperatorKind.IDENTITY:
            return rows.copy()
        if self.kind is OperatorKind.DIAGONAL:
            return rows * self.entries
        return rows @ self.matrix

    def as_matrix(self) -> np.ndarray:
        if self.kind is OperatorKind.IDENTITY:
            return np.eye(self.domain.dim)
        if self.kind is OperatorKind.DIAGONAL:
            return np.diag(self.entries)
        return self.matrix.copy()

    def diagonal_magnitudes(self) -> np.ndarray | None:
        """|entries| when the operator acts coordinatewise, else None."""
        if self.kind is OperatorKind.IDENTITY:
            return np.ones(self.domain.dim)
        if self.kind is OperatorKind.DIAGONAL:
            return np.abs(self.entries)
        return None
