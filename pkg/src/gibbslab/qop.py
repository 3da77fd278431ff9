"""Dense operator toolkit on n-qubit registers.

Conventions used throughout the package:

* site 0 is the leftmost tensor factor (most significant bit of the
  computational-basis index);
* vectorisation is column stacking, so ``X -> A @ X @ B`` has matrix
  ``kron(B.T, A)``;
* norms are the Schatten norms (operator norm = largest singular value).
"""
from __future__ import annotations

import dataclasses
import functools
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class DimensionError(ValueError):
    pass


def pauli_string(labels: str) -> np.ndarray:
    """Kronecker product of single-qubit Paulis, leftmost label is site 0."""
    try:
        factors = [PAULI[c] for c in labels.upper()]
    except KeyError as err:
        raise ValueError(f"unknown Pauli label {err.args[0]!r} in {labels!r}") from None
    return functools.reduce(np.kron, factors, np.ones((1, 1), dtype=np.complex128))


def num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def tensor_embed(op: np.ndarray, support: Sequence[int], n: int) -> np.ndarray:
    """Place ``op`` (acting on ``support`` in the listed order) into n qubits."""
    support = [int(s) for s in support]
    k = len(support)
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (2**k, 2**k):
        raise DimensionError(f"operator of shape {op.shape} does not act on {k} qubits")
    if len(set(support)) != k or any(s < 0 or s >= n for s in support):
        raise DimensionError(f"invalid support {support} for n={n}")
    rest = [s for s in range(n) if s not in support]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=np.complex128))
    order = support + rest
    perm = np.argsort(order)
    tensor = full.reshape([2] * (2 * n))
    tensor = tensor.transpose(list(perm) + [n + p for p in perm])
    return tensor.reshape(2**n, 2**n)


def partial_trace(X: np.ndarray, traced: Sequence[int], n: int) -> np.ndarray:
    """Trace out the listed sites; remaining sites keep their relative order."""
    traced = sorted(set(int(s) for s in traced))
    keep = [s for s in range(n) if s not in traced]
    tensor = np.asarray(X).reshape([2] * (2 * n))
    # bra/ket axes of the traced sites get the same einsum label
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = [letters[i] for i in range(n)]
    col = [letters[n + i] for i in range(n)]
    for s in traced:
        col[s] = row[s]
    out = "".join(row[s] for s in keep) + "".join(col[s] for s in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, tensor)
    dk = 2 ** len(keep)
    return reduced.reshape(dk, dk)


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(dim, dim, order="F")


def dagger(X: np.ndarray) -> np.ndarray:
    return X.conj().T


def hermitian_part(X: np.ndarray) -> np.ndarray:
    return (X + X.conj().T) / 2


def op_norm(X: np.ndarray) -> float:
    return float(np.linalg.norm(X, 2)) if np.asarray(X).size else 0.0


def trace_norm(X: np.ndarray) -> float:
    X = np.asarray(X)
    if np.allclose(X, X.conj().T, rtol=0, atol=1e-14 * max(1.0, np.abs(X).max())):
        return float(np.abs(np.linalg.eigvalsh(hermitian_part(X))).sum())
    return float(np.linalg.svd(X, compute_uv=False).sum())


@dataclasses.dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition of a Hermitian matrix with grouped eigenvalues.

    ``evals`` and ``evecs`` are the raw ``eigh`` output; ``levels`` are the
    distinct eigenvalues after grouping and ``level_index[k]`` is the level
    of eigenvector k.
    """

    evals: np.ndarray
    evecs: np.ndarray
    levels: np.ndarray
    level_index: np.ndarray

    @property
    def projectors(self) -> list[np.ndarray]:
        out = []
        for k in range(len(self.levels)):
            V = self.evecs[:, self.level_index == k]
            out.append(V @ V.conj().T)
        return out

    @property
    def grouped_evals(self) -> np.ndarray:
        return self.levels[self.level_index]

    def function(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        U = self.evecs
        return (U * fn(self.evals)) @ U.conj().T


def herm_eig(X: np.ndarray, grouping_tol: float = 1e-9) -> SpectralData:
    """Hermitian eigendecomposition; eigenvalues closer than
    ``grouping_tol * spectral_range`` are merged into one level."""
    X = np.asarray(X)
    herm_err = np.abs(X - X.conj().T).max() if X.size else 0.0
    if herm_err > 1e-10 * max(1.0, np.abs(X).max()):
        raise ValueError(f"matrix is not Hermitian (max asymmetry {herm_err:.2e})")
    evals, evecs = np.linalg.eigh(hermitian_part(X))
    spread = evals[-1] - evals[0] if evals.size else 0.0
    tol = grouping_tol * spread
    level_index = np.zeros(evals.size, dtype=int)
    starts = [0]
    for k in range(1, evals.size):
        if evals[k] - evals[starts[-1]] > tol:
            starts.append(k)
        level_index[k] = len(starts) - 1
    bounds = starts + [evals.size]
    levels = np.array([evals[bounds[i] : bounds[i + 1]].mean() for i in range(len(starts))])
    return SpectralData(evals, evecs, levels, level_index)


def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    """Normalised exp(-beta H), computed from the ground-state-shifted spectrum."""
    evals, U = np.linalg.eigh(hermitian_part(np.asarray(H)))
    w = gibbs_weights(evals, beta)
    return (U * w) @ U.conj().T


def gibbs_weights(evals: np.ndarray, beta: float) -> np.ndarray:
    w = np.exp(-beta * (evals - evals.min()))
    return w / w.sum()


def expm_hermitian(H: np.ndarray, t: complex) -> np.ndarray:
    """exp(t H) for Hermitian H via eigendecomposition."""
    evals, U = np.linalg.eigh(hermitian_part(np.asarray(H)))
    return (U * np.exp(t * evals)) @ U.conj().T


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (A + A.conj().T) / 2


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    A = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


@dataclasses.dataclass(frozen=True)
class Superoperator:
    """Linear map on dim x dim matrices, stored as a dim^2 x dim^2 matrix
    acting on column-stacked vectors."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(X), self.dim)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix + other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Superoperator":
        return Superoperator(scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix @ other.matrix)

    def adjoint(self) -> "Superoperator":
        """Adjoint with respect to the Hilbert-Schmidt inner product."""
        return Superoperator(self.matrix.conj().T)

    def expm(self, t: float = 1.0) -> "Superoperator":
        return Superoperator(scipy.linalg.expm(t * self.matrix))

    def change_basis(self, U: np.ndarray) -> "Superoperator":
        """Conjugate by X -> U X U^dagger on both input and output."""
        S = np.kron(U.conj(), U)
        return Superoperator(S @ self.matrix @ S.conj().T)

    @classmethod
    def identity(cls, dim: int) -> "Superoperator":
        return cls(np.eye(dim * dim, dtype=np.complex128))

    @classmethod
    def sandwich(cls, A: np.ndarray, B: np.ndarray) -> "Superoperator":
        """X -> A X B."""
        return cls(np.kron(np.asarray(B).T, np.asarray(A)))

    @classmethod
    def from_map(cls, fn: Callable[[np.ndarray], np.ndarray], dim: int) -> "Superoperator":
        cols = []
        for k in range(dim * dim):
            E = np.zeros(dim * dim, dtype=np.complex128)
            E[k] = 1
            cols.append(vec(fn(unvec(E, dim))))
        return cls(np.stack(cols, axis=1))

    @classmethod
    def dissipator(cls, A: np.ndarray) -> "Superoperator":
        """X -> A X A^dagger - {A^dagger A, X}/2."""
        A = np.asarray(A, dtype=np.complex128)
        dim = A.shape[0]
        eye = np.eye(dim)
        AdA = A.conj().T @ A
        return cls(np.kron(A.conj(), A) - 0.5 * (np.kron(eye, AdA) + np.kron(AdA.T, eye)))

    @classmethod
    def commutator(cls, C: np.ndarray, coeff: complex = -1j) -> "Superoperator":
        """X -> coeff [C, X]."""
        C = np.asarray(C, dtype=np.complex128)
        eye = np.eye(C.shape[0])
        return cls(coeff * (np.kron(eye, C) - np.kron(C.T, eye)))


def induced_1norm_lower(
    S: Superoperator,
    rng: np.random.Generator,
    restarts: int = 256,
    max_iter: int = 50,
) -> float:
    """Certified lower bound on the induced trace norm of a Hermiticity
    preserving map, maximised over pure inputs.

    Each restart alternates Z = sign(S(psi psi^dagger)) with psi = top
    eigenvector of S^dagger(Z); the objective never decreases and the value
    returned is evaluated exactly, so it is a valid lower bound (also on
    the diamond norm).
    """
    dim = S.dim
    Sadj = S.adjoint()
    best = 0.0
    starts = [np.eye(dim)[k] for k in range(dim)]
    starts += [random_pure_state(dim, rng) for _ in range(max(restarts - dim, 0))]
    for psi in starts[:max(restarts, 1)]:
        value = -1.0
        for _ in range(max_iter):
            Y = hermitian_part(S(np.outer(psi, psi.conj())))
            w, V = np.linalg.eigh(Y)
            new_value = float(np.abs(w).sum())
            if new_value <= value * (1 + 1e-12):
                value = max(value, new_value)
                break
            value = new_value
            Z = (V * np.sign(w)) @ V.conj().T
            _, W = np.linalg.eigh(hermitian_part(Sadj(Z)))
            psi = W[:, -1]
        best = max(best, value)
    return best
