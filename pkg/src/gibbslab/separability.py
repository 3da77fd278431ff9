"""Cluster expansion of e^{-beta H} e^{beta (H - W_origin)} around the
identity, with cluster enumeration, the combinatorial coefficients A_{k,t}
and the resulting deviation bounds."""
from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from collections import Counter
from typing import Iterator

import numpy as np

from .hamiltonian import LocalHamiltonian
from .qop import expm_hermitian, op_norm


# clusters ---------------------------------------------------------------------
def _is_cluster(H: LocalHamiltonian, seq: tuple[int, ...], origin: int) -> bool:
    if not seq or origin not in H.terms[seq[0]].support:
        return False
    covered = set(H.terms[seq[0]].support)
    for a in seq[1:]:
        supp = set(H.terms[a].support)
        if not supp & covered:
            return False
        covered |= supp
    return True


def enumerate_clusters(H: LocalHamiltonian, origin: int, k: int) -> Iterator[tuple[int, ...]]:
    """Ordered term sequences (a_1..a_k), repeats allowed, with origin in
    supp(a_1) and each a_l overlapping the union of the earlier supports."""
    m = len(H.terms)

    def extend(seq, covered):
        if len(seq) == k:
            yield seq
            return
        for a in range(m):
            supp = H.terms[a].support
            if covered.intersection(supp):
                yield from extend(seq + (a,), covered | set(supp))

    for a in H.site_terms[origin]:
        yield from extend((a,), frozenset(H.terms[a].support))


def enumerate_clusters_brute_force(H: LocalHamiltonian, origin: int, k: int) -> list[tuple[int, ...]]:
    return [s for s in itertools.product(range(len(H.terms)), repeat=k) if _is_cluster(H, s, origin)]


def cluster_counts(H: LocalHamiltonian, origin: int, k_max: int) -> list[int]:
    """Number of clusters of each size 1..k_max, by dynamic programming over
    the set of covered sites."""
    masks = [sum(1 << s for s in t.support) for t in H.terms]
    state: Counter[int] = Counter(masks[a] for a in H.site_terms[origin])
    counts = []
    for _ in range(k_max):
        counts.append(sum(state.values()))
        nxt: Counter[int] = Counter()
        for cov, c in state.items():
            for mk in masks:
                if cov & mk:
                    nxt[cov | mk] += c
        state = nxt
    return counts


def cluster_count_cap(k: int, D: int, L: int) -> int:
    return D**k * L ** (k - 1) * math.factorial(k - 1)


# combinatorial coefficients -------------------------------------------------------
@functools.lru_cache(maxsize=None)
def akt(k: int, t: int, L: int) -> int:
    """A_{k,t} = L k A_{k,t-1} + A_{k-1,t-1}, A_{0,0} = 1, A_{0,t>0} = 0, A_{k>t} = 0."""
    if k < 0 or t < 0 or k > t:
        return 0
    if k == 0:
        return 1 if t == 0 else 0
    return L * k * akt(k, t - 1, L) + akt(k - 1, t - 1, L)


def akt_brute_force(k: int, t: int, L: int) -> int:
    """Direct sum over c in {0,1}^t with k ones of
    prod_j ([c_j = 1] + [c_j = 0] (c_1 + ... + c_{j-1}) L)."""
    total = 0
    for ones in itertools.combinations(range(t), k):
        prod, seen = 1, 0
        for j in range(t):
            if j in ones:
                seen += 1
            else:
                prod *= seen * L
        total += prod
    return total


def combo_identity_check(alpha: float, L: int, k: int, t_max: int = 400) -> float:
    """Relative error of sum_t alpha^t/t! A_{k,t} against (1/k!) ((e^{alpha L} - 1)/L)^k."""
    lhs = 0.0
    for t in range(k, t_max + 1):
        a = akt(k, t, L)
        if a == 0:
            continue
        term = math.exp(math.log(a) + t * math.log(alpha) - math.lgamma(t + 1))
        lhs += term
        if t > k + 10 and term < 1e-18 * lhs:
            break
    rhs = (math.expm1(alpha * L) / L) ** k / math.factorial(k)
    return abs(lhs - rhs) / rhs


def cluster_coeff_bound(k: int, beta: float, h: float, L: int) -> float:
    """(1/k!) ((e^{4 beta h L} - 1) / (h L))^k, with the h -> 0 limit (4 beta)^k / k!."""
    base = 4 * beta if h == 0 else math.expm1(4 * beta * h * L) / (h * L)
    return math.exp(k * math.log(base) - math.lgamma(k + 1))


# regimes -----------------------------------------------------------------------
def field_window(beta: float, D: int, L: int) -> float:
    return math.log(1 / (4 * D * L * beta)) / (8 * beta * L)


def araki_regime(beta: float, h: float, D: int, L: int) -> bool:
    """beta <= 1/(4 D L 56^L) and h <= log(1/(4 D L beta)) / (8 beta L)."""
    return beta <= 1 / (4 * D * L * 56**L) and h <= field_window(beta, D, L)


def separability_regime(beta: float, h: float, D: int, L: int) -> bool:
    """beta <= 1/(8 D L 56^{2L}) and the same field window."""
    return beta <= 1 / (8 * D * L * 56 ** (2 * L)) and h <= field_window(beta, D, L)


def geometric_cluster_regime(beta: float, h: float, D: int, L: int) -> bool:
    """Condition under which every cluster-size term obeys the (1/56)^{kL} decay."""
    return beta <= 1 / (4 * D * L * 56 ** (2 * L)) and h <= field_window(beta, D, L)


# Araki expansional ----------------------------------------------------------------
def araki_expansional(H: LocalHamiltonian, beta: float, origin: int) -> np.ndarray:
    """X = e^{-beta H} e^{beta (H - W_origin)}, W_origin the terms touching ``origin``."""
    Hd = H.dense
    Hp = H.without_terms_at(origin).dense
    shift = np.linalg.eigvalsh(Hd)[0]
    eye = np.eye(Hd.shape[0])
    return expm_hermitian(Hd - shift * eye, -beta) @ expm_hermitian(Hp - shift * eye, beta)


@dataclasses.dataclass(frozen=True)
class ArakiReport:
    deviation: float
    aggregate_bound: float
    terms: list[float]
    in_regime: bool

    @property
    def passed(self) -> bool:
        return self.deviation <= self.aggregate_bound * (1 + 1e-9) + 1e-14


def aggregate_bound(H: LocalHamiltonian, beta: float, origin: int, k_max: int = 400) -> tuple[float, list[float]]:
    """sum_k (number of size-k clusters) * cluster_coeff_bound(k).

    The series is cut once the remaining tail is provably below 1e-16 of the
    sum: every size-(k+1) cluster extends a size-k one, so
    count_{k+1} <= m count_k with m the number of terms."""
    h = H.field_norm
    L = max(H.locality, 1)
    m = len(H.terms)
    base = 4 * beta if h == 0 else math.expm1(4 * beta * h * L) / (h * L)
    counts = cluster_counts(H, origin, k_max)
    terms: list[float] = []
    total = 0.0
    for k in range(1, k_max + 1):
        term = counts[k - 1] * cluster_coeff_bound(k, beta, h, L)
        terms.append(term)
        total += term
        r = m * base / (k + 1)
        if counts[k - 1] == 0 or (r < 1 and term * r / (1 - r) <= 1e-16 * total):
            return total, terms
    raise RuntimeError("cluster series did not converge within k_max terms")


def araki_check(H: LocalHamiltonian, beta: float, origin: int) -> ArakiReport:
    dev = op_norm(araki_expansional(H, beta, origin) - np.eye(2**H.n))
    bound, terms = aggregate_bound(H, beta, origin)
    return ArakiReport(dev, bound, terms, araki_regime(beta, H.field_norm, max(H.degree, 1), max(H.locality, 1)))
