"""Row-space metrics and the reduced-echelon split of a received matrix."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import AmbientMismatch, MalformedInput
from .ff_tower import Mat, common_field
from .matrix import rank, row_basis, rref_only


@dataclass(frozen=True)
class Subspace:
    """Row space of a matrix, stored as its canonical RREF basis."""

    basis: Mat

    @classmethod
    def span(cls, A: Mat) -> "Subspace":
        return cls(row_basis(A))

    @property
    def ambient_dim(self) -> int:
        return self.basis.ncols

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def field(self):
        return self.basis.field

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return Subspace.span(Mat.vstack(self.basis, other.basis))

    def __contains__(self, v: Mat) -> bool:
        return rank(Mat.vstack(self.basis, v)) == self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.basis.shape == other.basis.shape and self.basis.rows == other.basis.rows

    def __hash__(self) -> int:
        return hash(self.basis.rows)


def _check_ambient(U1: Subspace, U2: Subspace) -> None:
    if U1.ambient_dim != U2.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions {U1.ambient_dim} and {U2.ambient_dim} differ")
    common_field(U1.field, U2.field)


def _sum_dim(U1: Subspace, U2: Subspace) -> int:
    _check_ambient(U1, U2)
    if not U1.dim or not U2.dim:
        return U1.dim + U2.dim
    return rank(Mat.vstack(U1.basis, U2.basis))


def intersection_dim(U1: Subspace, U2: Subspace) -> int:
    return U1.dim + U2.dim - _sum_dim(U1, U2)


def subspace_distance(U1: Subspace, U2: Subspace) -> int:
    """d_S = dim(U1 + U2) - dim(U1 & U2)."""
    s = _sum_dim(U1, U2)
    return 2 * s - U1.dim - U2.dim


def injection_distance(U1: Subspace, U2: Subspace) -> int:
    """d_I = max(dim U1, dim U2) - dim(U1 & U2)."""
    s = _sum_dim(U1, U2)
    return s - min(U1.dim, U2.dim)


@dataclass(frozen=True)
class RreDecomposition:
    """[T_rre | M_rre] = [[I + L_hat U^T, r], [0, E_hat]] with U the unit columns in ``missing``."""

    T_rre: Mat
    M_rre: Mat
    L_hat: Mat
    r: Mat
    E_hat: Mat
    missing: tuple[int, ...]

    @property
    def mu(self) -> int:
        return len(self.missing)

    @property
    def delta(self) -> int:
        return self.E_hat.nrows

    @property
    def U(self) -> Mat:
        C = self.L_hat.nrows
        return Mat(self.L_hat.field, [[int(i == u) for u in self.missing] for i in range(C)], len(self.missing))


def rre_decompose(Ya: Mat, C: int) -> RreDecomposition:
    """Split the RREF of ``Ya`` at column ``C``.

    Rows pivoting inside the first C columns are placed at the row index of
    their pivot; the pivot-free columns among the first C give the unit
    columns U and the correction L_hat = (T - I)[:, U].  Rows pivoting at or
    after C become the known error values E_hat.
    """
    if Ya.ncols < C:
        raise MalformedInput(f"{Ya.ncols} columns, need at least C={C}")
    F = Ya.field
    R, pivots = rref_only(Ya)
    width = Ya.ncols - C
    T = [[0] * C for _ in range(C)]
    r = [[0] * width for _ in range(C)]
    E = []
    for row, c in zip(R.rows, pivots):
        if c < C:
            T[c] = list(row[:C])
            r[c] = list(row[C:])
        else:
            E.append(list(row[C:]))
    placed = {c for c in pivots if c < C}
    missing = tuple(c for c in range(C) if c not in placed)
    # (T - I) restricted to the missing columns; T has zero rows there
    L_hat = [[F.sub(T[i][u], int(i == u)) for u in missing] for i in range(C)]
    delta = len(E)
    T_rre = Mat(F, T + [[0] * C for _ in range(delta)], C)
    M_rre = Mat(F, r + E, width)
    return RreDecomposition(
        T_rre=T_rre,
        M_rre=M_rre,
        L_hat=Mat(F, L_hat, len(missing)),
        r=Mat(F, r, width),
        E_hat=Mat(F, E, width),
        missing=missing,
    )
