"""Local Hamiltonians H = V + W with an on-site field V and an
interaction W given as a list of terms acting on two or more qubits."""
from __future__ import annotations

import dataclasses
import functools
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .qop import PAULI, op_norm, pauli_string, random_hermitian, tensor_embed


class SpecError(ValueError):
    """Malformed Hamiltonian description; ``path`` points at the offending field."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path
        self.msg = msg


@dataclasses.dataclass(frozen=True, eq=False)
class LocalTerm:
    support: tuple[int, ...]
    matrix: np.ndarray

    @functools.cached_property
    def norm(self) -> float:
        return op_norm(self.matrix)


@dataclasses.dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    n: int
    terms: tuple[LocalTerm, ...]
    field: tuple[np.ndarray, ...]

    @classmethod
    def build(
        cls,
        n: int,
        terms: Iterable[tuple[Sequence[int], np.ndarray]] | Iterable[LocalTerm],
        field: Sequence[np.ndarray] | None = None,
        *,
        check_norm: bool = True,
        min_support: int = 2,
    ) -> "LocalHamiltonian":
        parsed = []
        for k, term in enumerate(terms):
            if isinstance(term, LocalTerm):
                support, matrix = term.support, term.matrix
            else:
                support, matrix = term
            support = tuple(int(s) for s in support)
            matrix = np.asarray(matrix, dtype=np.complex128)
            where = f"terms[{k}]"
            if len(support) < min_support:
                raise SpecError(where, f"support {support} has fewer than {min_support} sites")
            if len(set(support)) != len(support) or min(support) < 0 or max(support) >= n:
                raise SpecError(where, f"invalid support {support} for n={n}")
            if matrix.shape != (2 ** len(support),) * 2:
                raise SpecError(where, f"matrix shape {matrix.shape} does not match support size {len(support)}")
            if np.abs(matrix - matrix.conj().T).max() > 1e-12 * max(1.0, np.abs(matrix).max()):
                raise SpecError(where, "term is not Hermitian")
            t = LocalTerm(support, matrix)
            if check_norm and t.norm > 1 + 1e-12:
                raise SpecError(where, f"term norm {t.norm:.6g} exceeds 1")
            parsed.append(t)
        if field is None:
            field = [np.zeros((2, 2), dtype=np.complex128)] * n
        field = tuple(np.asarray(v, dtype=np.complex128) for v in field)
        if len(field) != n:
            raise SpecError("field", f"expected {n} on-site blocks, got {len(field)}")
        for i, v in enumerate(field):
            if v.shape != (2, 2) or np.abs(v - v.conj().T).max() > 1e-12 * max(1.0, np.abs(v).max()):
                raise SpecError(f"field[{i}]", "on-site field must be a Hermitian 2x2 matrix")
        return cls(int(n), tuple(parsed), field)

    # structure -----------------------------------------------------------
    @property
    def locality(self) -> int:
        return max((len(t.support) for t in self.terms), default=0)

    @functools.cached_property
    def site_terms(self) -> tuple[tuple[int, ...], ...]:
        """Indices of the terms acting on each site."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        for a, t in enumerate(self.terms):
            for s in t.support:
                out[s].append(a)
        return tuple(tuple(x) for x in out)

    @property
    def degree(self) -> int:
        return max((len(x) for x in self.site_terms), default=0)

    @functools.cached_property
    def zeta(self) -> float:
        """max_i sum over terms containing i of |supp| * ||W_a||."""
        loads = [sum(len(self.terms[a].support) * self.terms[a].norm for a in idx) for idx in self.site_terms]
        return float(max(loads, default=0.0))

    @functools.cached_property
    def field_gaps(self) -> np.ndarray:
        """Spectral width lambda_max - lambda_min of each on-site block."""
        return np.array([np.ptp(np.linalg.eigvalsh(v)) for v in self.field])

    @functools.cached_property
    def field_norm(self) -> float:
        return float(max((op_norm(v) for v in self.field), default=0.0))

    @functools.cached_property
    def distances(self) -> np.ndarray:
        """Site distances counted in interaction terms; unreachable pairs are inf."""
        rows, cols = [], []
        for t in self.terms:
            for i in t.support:
                for j in t.support:
                    if i != j:
                        rows.append(i)
                        cols.append(j)
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        return shortest_path(adj, unweighted=True, directed=False)

    def dist(self, i: int, j: int) -> float:
        return float(self.distances[i, j])

    def set_distance(self, X: Iterable[int], Y: Iterable[int]) -> float:
        X, Y = list(X), list(Y)
        if not X or not Y:
            return np.inf
        return float(self.distances[np.ix_(X, Y)].min())

    def ball(self, sites: Iterable[int], r: float) -> frozenset[int]:
        sites = list(sites)
        d = self.distances[sites].min(axis=0)
        return frozenset(int(j) for j in np.flatnonzero(d <= r))

    # derived Hamiltonians -------------------------------------------------
    def restrict(self, region: Iterable[int]) -> "LocalHamiltonian":
        """Keep the full field and only the terms supported inside ``region``."""
        region = set(region)
        kept = tuple(t for t in self.terms if set(t.support) <= region)
        return LocalHamiltonian(self.n, kept, self.field)

    def truncate(self, center: int, r: float) -> "LocalHamiltonian":
        """H_r = V + sum of terms inside the radius-r ball around ``center``."""
        if r < 0:
            raise ValueError("truncation radius must be non-negative")
        return self.restrict(self.ball([center], r))

    def without_terms_at(self, site: int) -> "LocalHamiltonian":
        kept = tuple(t for t in self.terms if site not in t.support)
        return LocalHamiltonian(self.n, kept, self.field)

    def field_only(self) -> "LocalHamiltonian":
        return LocalHamiltonian(self.n, (), self.field)

    # dense forms ------------------------------------------------------------
    def term_dense(self, a: int) -> np.ndarray:
        t = self.terms[a]
        return tensor_embed(t.matrix, t.support, self.n)

    @functools.cached_property
    def field_dense(self) -> np.ndarray:
        out = np.zeros((2**self.n,) * 2, dtype=np.complex128)
        for i, v in enumerate(self.field):
            if np.any(v):
                out += tensor_embed(v, [i], self.n)
        return out

    @functools.cached_property
    def interaction_dense(self) -> np.ndarray:
        out = np.zeros((2**self.n,) * 2, dtype=np.complex128)
        for a in range(len(self.terms)):
            out += self.term_dense(a)
        return out

    @functools.cached_property
    def dense(self) -> np.ndarray:
        if self.n > 14:
            raise MemoryError(f"dense form of {self.n} qubits is too large")
        return self.field_dense + self.interaction_dense

    # serialisation ----------------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "terms": [{"support": list(t.support), "matrix": _encode_matrix(t.matrix)} for t in self.terms],
            "field": [{"site": i, "matrix": _encode_matrix(v)} for i, v in enumerate(self.field) if np.any(v)],
        }


def z_field(h: float | Sequence[float], n: int) -> list[np.ndarray]:
    """On-site blocks (h_i/2) sigma_Z, so each site has spectral width h_i."""
    hs = np.broadcast_to(np.asarray(h, dtype=float), (n,))
    return [hi / 2 * PAULI["Z"] for hi in hs]


def chain(
    n: int,
    couplings: Sequence[str] = ("ZZ",),
    h: float | Sequence[float] = 0.0,
    coeff: float = 1.0,
) -> LocalHamiltonian:
    """Nearest-neighbour open chain with Pauli-string couplings."""
    terms = []
    for i in range(n - 1):
        for p in couplings:
            terms.append(((i, i + 1), coeff * pauli_string(p)))
    return LocalHamiltonian.build(n, terms, z_field(h, n))


def random_chain(
    n: int,
    rng: np.random.Generator,
    h: float | Sequence[float] = 0.0,
    random_field_axis: bool = False,
) -> LocalHamiltonian:
    """Open chain with random Hermitian bonds of unit norm."""
    terms = []
    for i in range(n - 1):
        W = random_hermitian(4, rng)
        terms.append(((i, i + 1), W / op_norm(W)))
    field = z_field(h, n)
    if random_field_axis:
        field = [_rotate(v, rng) for v in field]
    return LocalHamiltonian.build(n, terms, field)


def _rotate(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return Q @ v @ Q.conj().T


# JSON ---------------------------------------------------------------------
def _encode_matrix(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def _decode_entry(x: Any, path: str) -> complex:
    if isinstance(x, bool):
        raise SpecError(path, "boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(y, (int, float)) for y in x):
        return complex(x[0], x[1])
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", ""))
        except ValueError:
            pass
    raise SpecError(path, f"cannot read {x!r} as a complex number")


def _decode_matrix(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SpecError(path, "matrix must be a non-empty list of rows")
    rows = [[_decode_entry(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(obj)]
    if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
        raise SpecError(path, "matrix must be square")
    return np.array(rows, dtype=np.complex128)


def from_json(obj: dict[str, Any], *, check_norm: bool = True, min_support: int = 2) -> LocalHamiltonian:
    """Parse ``{"n", "terms": [...], "field": [...]}``.

    A term is ``{"support": [...], "paulis": "XZ", "coeff": c}`` or
    ``{"support": [...], "matrix": [[...]]}``.  A field entry is
    ``{"site": i, "matrix": [[...]]}`` or ``{"site": i, "z": h}`` meaning
    (h/2) sigma_Z.
    """
    if not isinstance(obj, dict):
        raise SpecError("$", "top level must be an object")
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SpecError("n", f"expected a positive integer, got {n!r}")
    terms = []
    for k, t in enumerate(obj.get("terms", [])):
        path = f"terms[{k}]"
        if not isinstance(t, dict):
            raise SpecError(path, "term must be an object")
        support = t.get("support")
        if "paulis" in t:
            labels = t["paulis"]
            if not isinstance(labels, str) or not labels:
                raise SpecError(f"{path}.paulis", "expected a Pauli string")
            if support is None:
                if len(labels) != n:
                    raise SpecError(f"{path}.paulis", "without a support the string must cover all n sites")
                support = [i for i, c in enumerate(labels) if c.upper() != "I"]
                labels = "".join(c for c in labels if c.upper() != "I")
            if not isinstance(support, list) or len(support) != len(labels):
                raise SpecError(f"{path}.support", "support length must match the Pauli string")
            coeff = t.get("coeff", 1.0)
            if not isinstance(coeff, (int, float)) or isinstance(coeff, bool):
                raise SpecError(f"{path}.coeff", "coefficient must be real")
            try:
                matrix = coeff * pauli_string(labels)
            except ValueError as err:
                raise SpecError(f"{path}.paulis", str(err)) from None
        elif "matrix" in t:
            matrix = _decode_matrix(t["matrix"], f"{path}.matrix") * t.get("coeff", 1.0)
        else:
            raise SpecError(path, "term needs 'paulis' or 'matrix'")
        if not isinstance(support, list) or not all(isinstance(s, int) for s in support):
            raise SpecError(f"{path}.support", "support must be a list of site indices")
        terms.append((support, matrix))
    field = [np.zeros((2, 2), dtype=np.complex128) for _ in range(n)]
    for k, f in enumerate(obj.get("field", [])):
        path = f"field[{k}]"
        if not isinstance(f, dict) or not isinstance(f.get("site"), int) or not 0 <= f["site"] < n:
            raise SpecError(path, "field entry needs an integer 'site' in range")
        if "matrix" in f:
            field[f["site"]] = _decode_matrix(f["matrix"], f"{path}.matrix")
        elif "z" in f:
            if not isinstance(f["z"], (int, float)):
                raise SpecError(f"{path}.z", "expected a real number")
            field[f["site"]] = f["z"] / 2 * PAULI["Z"]
        else:
            raise SpecError(path, "field entry needs 'matrix' or 'z'")
    return LocalHamiltonian.build(n, terms, field, check_norm=check_norm, min_support=min_support)


def load(path: str | Path, **kwargs) -> LocalHamiltonian:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise SpecError("$", f"invalid JSON: {err}") from None
    return from_json(obj, **kwargs)
