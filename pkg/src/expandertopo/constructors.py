"""Topology generators: LPS Ramanujan graphs, random regular graphs, circulants."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphError, build_graph, from_edge_array, is_connected


class ConstructionError(GraphError):
    pass


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    return all(k % f for f in range(3, math.isqrt(k) + 1, 2))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


# ---------------------------------------------------------------- LPS


@dataclass(frozen=True)
class LpsParams:
    p: int
    q: int
    legendre_pq: int = field(init=False)

    def __post_init__(self):
        p, q = self.p, self.q
        for name, val in (("p", p), ("q", q)):
            if not is_prime(val) or val % 4 != 1:
                raise ConstructionError(f"{name}={val} must be a prime congruent to 1 mod 4")
        if p == q:
            raise ConstructionError("p and q must differ")
        if q <= 2 * math.sqrt(p):
            raise ConstructionError(f"q={q} must exceed 2*sqrt(p)={2 * math.sqrt(p):.4f}")
        object.__setattr__(self, "legendre_pq", legendre(p, q))

    @property
    def n_vertices(self) -> int:
        full = self.q * (self.q**2 - 1)
        return full // 2 if self.legendre_pq == 1 else full


def lps_quadruples(p: int) -> list[tuple[int, int, int, int]]:
    """Solutions of a0^2+a1^2+a2^2+a3^2 = p with a0 > 0 odd and a1, a2, a3 even."""
    r = math.isqrt(p)
    evens = [a for a in range(-r, r + 1) if a % 2 == 0]
    sols = []
    for a0 in range(1, r + 1, 2):
        for a1, a2, a3 in itertools.product(evens, repeat=3):
            if a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3 == p:
                sols.append((a0, a1, a2, a3))
    return sols


def sqrt_minus_one(q: int) -> int:
    for i in range(2, q):
        if (i * i + 1) % q == 0:
            return i
    raise ConstructionError(f"-1 has no square root mod {q}")


def lps_generators(params: LpsParams) -> np.ndarray:
    """The p+1 generator matrices over GF(q), shape (p+1, 2, 2)."""
    p, q = params.p, params.q
    quads = lps_quadruples(p)
    if len(quads) != p + 1:
        raise ConstructionError(f"found {len(quads)} quadruples for p={p}, expected {p + 1}")
    i = sqrt_minus_one(q)
    gens = [
        [[a0 + i * a1, a2 + i * a3], [-a2 + i * a3, a0 - i * a1]]
        for a0, a1, a2, a3 in quads
    ]
    return np.array(gens, dtype=np.int64) % q


def _normalize_projective(mats: np.ndarray, q: int, inv: np.ndarray) -> np.ndarray:
    """Scale each flattened 2x2 matrix (rows of length 4) so its first nonzero entry is 1."""
    first = np.argmax(mats != 0, axis=1)
    lead = mats[np.arange(len(mats)), first]
    return (mats * inv[lead][:, None]) % q


def _pgl_elements(q: int) -> np.ndarray:
    """Canonical representatives of PGL(2, q) as rows (a, b, c, d)."""
    r = np.arange(q)
    b, c, d = (x.ravel() for x in np.meshgrid(r, r, r, indexing="ij"))
    lead_a = np.stack([np.ones_like(b), b, c, d], axis=1)
    lead_a = lead_a[(d - b * c) % q != 0]
    c2, d2 = (x.ravel() for x in np.meshgrid(r, r, indexing="ij"))
    lead_b = np.stack([np.zeros_like(c2), np.ones_like(c2), c2, d2], axis=1)
    lead_b = lead_b[c2 != 0]
    return np.concatenate([lead_a, lead_b]).astype(np.int64)


def lps_graph(p: int, q: int) -> Graph:
    """LPS Cayley graph X^{p,q}: (p+1)-regular on PSL(2,q) or PGL(2,q).

    Vertices are projective classes; when p is a square mod q only the
    classes with square determinant (the PSL(2,q) image) are kept.
    """
    params = LpsParams(p, q)
    gens = lps_generators(params).reshape(-1, 4)
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = [pow(int(x), q - 2, q) for x in range(1, q)]

    verts = _pgl_elements(q)
    if params.legendre_pq == 1:
        squares = np.zeros(q, dtype=bool)
        squares[(np.arange(1, q) ** 2) % q] = True
        det = (verts[:, 0] * verts[:, 3] - verts[:, 1] * verts[:, 2]) % q
        verts = verts[squares[det]]
    n = len(verts)
    if n != params.n_vertices:
        raise ConstructionError(f"vertex count {n} != expected {params.n_vertices}")

    code = lambda m: ((m[:, 0] * q + m[:, 1]) * q + m[:, 2]) * q + m[:, 3]
    lookup = np.full(q**4, -1, dtype=np.int64)
    lookup[code(verts)] = np.arange(n)

    a, b, c, d = verts.T
    src = np.arange(n)
    pairs = []
    for s in gens:
        prod = np.stack(
            [a * s[0] + b * s[2], a * s[1] + b * s[3], c * s[0] + d * s[2], c * s[1] + d * s[3]],
            axis=1,
        ) % q
        dst = lookup[code(_normalize_projective(prod, q, inv))]
        if np.any(dst < 0):
            raise ConstructionError("generator maps a vertex outside the vertex set")
        pairs.append(np.stack([src, dst], axis=1))
    arcs = np.concatenate(pairs)
    if np.any(arcs[:, 0] == arcs[:, 1]):
        raise ConstructionError("generator produced a self-loop")
    arcs = np.sort(arcs, axis=1)
    edges, mult = np.unique(arcs, axis=0, return_counts=True)
    # every undirected edge is reached once from each endpoint
    if np.any(mult != 2):
        raise ConstructionError("generator set is not inverse-closed or produces multi-edges")
    g = from_edge_array(n, edges)
    if g.regular_degree() != p + 1:
        raise ConstructionError(f"graph is not {p + 1}-regular")
    if not is_connected(g):
        raise ConstructionError("LPS graph is disconnected")
    return g


# ---------------------------------------------------------------- random regular


@dataclass(frozen=True)
class RandomRegularParams:
    n: int
    d: int
    seed: int = 0
    max_attempts: int = 100_000

    def __post_init__(self):
        if self.n < 3:
            raise ConstructionError(f"n must be >= 3, got {self.n}")
        if self.d < 2 or self.d % 2:
            raise ConstructionError(f"d must be even and >= 2, got {self.d}")
        if self.d >= self.n:
            raise ConstructionError(f"d={self.d} must be < n={self.n}")


class SamplingExhausted(ConstructionError):
    def __init__(self, attempts: int):
        super().__init__(f"no simple connected sample after {attempts} attempts")
        self.attempts = attempts


def _conflicts(perm: np.ndarray, idx: np.ndarray, n: int, taken: np.ndarray) -> np.ndarray:
    """Positions whose edge (i, perm[i]) is a self-loop, a 2-cycle twin, or already taken."""
    keys = np.minimum(idx, perm) * n + np.maximum(idx, perm)
    bad = (perm == idx) | (perm[perm] == idx)
    if taken.size:
        bad |= np.isin(keys, taken)
    return np.flatnonzero(bad)


def random_regular(params: RandomRegularParams) -> Graph:
    """Random d-regular graph from the union of d/2 uniform permutations.

    Entries of a freshly drawn permutation that would create a self-loop or
    repeat an edge are repaired by random transpositions (a swap is kept
    only if it lowers the conflict count).  A disconnected union is
    discarded as a whole.  Randomness comes from numpy's PCG64 seeded with
    ``params.seed``; every draw and swap proposal counts as an attempt.
    """
    n, half = params.n, params.d // 2
    rng = np.random.Generator(np.random.PCG64(params.seed))
    attempts = 0
    idx = np.arange(n)

    def tick():
        nonlocal attempts
        attempts += 1
        if attempts > params.max_attempts:
            raise SamplingExhausted(attempts - 1)

    stall_limit = 20 * n
    while True:
        taken = np.empty(0, dtype=np.int64)
        chunks = []
        for _ in range(half):
            tick()
            perm = rng.permutation(n)
            bad = _conflicts(perm, idx, n, taken)
            stalled = 0
            while bad.size and stalled < stall_limit:
                tick()
                i = int(bad[rng.integers(bad.size)])
                j = int(rng.integers(n))
                perm[i], perm[j] = perm[j], perm[i]
                fresh = _conflicts(perm, idx, n, taken)
                if fresh.size < bad.size:
                    bad, stalled = fresh, 0
                else:
                    perm[i], perm[j] = perm[j], perm[i]
                    stalled += 1
            if bad.size:
                break
            lo, hi = np.minimum(idx, perm), np.maximum(idx, perm)
            taken = np.concatenate([taken, lo * n + hi])
            # each 2-cycle-free permutation yields n distinct edges
            chunks.append(np.stack([lo, hi], axis=1))
        if len(chunks) < half:
            continue
        g = from_edge_array(n, np.concatenate(chunks))
        if is_connected(g):
            return g


# ---------------------------------------------------------------- circulants

READINGS = ("shifted", "literal")


def circulant_offsets(n: int, d: int, reading: str = "shifted") -> list[int]:
    """Offsets for the comparison graphs joining i to i + step*k (mod n), step = n // d.

    ``shifted``: 1 + step*k for k = 0..d/2-1 (1-based node labels carried
    into 0-based arithmetic; reproduces the published condition numbers).
    ``literal``: step*k for k = 1..d/2.
    """
    if d < 2 or d % 2:
        raise ConstructionError(f"circulant degree must be even and >= 2, got {d}")
    if d >= n:
        raise ConstructionError(f"d={d} must be < n={n}")
    step = n // d
    if reading == "shifted":
        return [1 + step * k for k in range(d // 2)]
    if reading == "literal":
        return [step * k for k in range(1, d // 2 + 1)]
    raise ConstructionError(f"unknown circulant reading {reading!r}; choose from {READINGS}")


def circulant_from_offsets(n: int, offsets: list[int]) -> Graph:
    seen: dict[int, int] = {}
    for o in offsets:
        r = o % n
        if r == 0:
            raise ConstructionError(f"offset {o} is 0 mod {n} (self-loop)")
        if 2 * r == n:
            raise ConstructionError(f"offset {o} equals n/2 and contributes degree 1")
        cls = min(r, n - r)
        if cls in seen:
            raise ConstructionError(f"offsets {seen[cls]} and {o} coincide mod {n}")
        seen[cls] = o
    i = np.arange(n)
    edges = np.concatenate([np.stack([i, (i + o) % n], axis=1) for o in offsets])
    return from_edge_array(n, edges)


def circulant_regular(n: int, d: int, reading: str = "shifted") -> Graph:
    return circulant_from_offsets(n, circulant_offsets(n, d, reading))


def circulant_laplacian_spectrum(n: int, offsets: list[int]) -> np.ndarray:
    """Closed-form Laplacian spectrum of a circulant, via the characters j -> exp(2 pi i j o / n)."""
    j = np.arange(n)
    lam = np.zeros(n)
    for o in offsets:
        lam += 2.0 - 2.0 * np.cos(2.0 * np.pi * j * o / n)
    return np.sort(lam)


def circulant_kappa(n: int, offsets: list[int]) -> float:
    """Reduced condition number from the closed-form spectrum; inf if disconnected."""
    lam = circulant_laplacian_spectrum(n, offsets)
    if lam[1] < 1e-9:
        return math.inf
    return float(lam[-1] / lam[1])


def select_circulant_reading(n: int, d: int, target_kappa: float, tol: float = 0.01) -> str:
    """Pick the offset reading whose condition number matches ``target_kappa``.

    The literal reading is tried first; disconnected candidates never match.
    """
    results = {}
    for reading in ("literal", "shifted"):
        try:
            offs = circulant_offsets(n, d, reading)
            circulant_from_offsets(n, offs)
        except ConstructionError:
            continue
        kap = circulant_kappa(n, offs)
        results[reading] = kap
        if abs(kap - target_kappa) <= tol:
            return reading
    raise ConstructionError(f"no circulant reading matches kappa {target_kappa}: {results}")


# ---------------------------------------------------------------- named graphs


def named_graph(kind: str, n: int | None = None) -> Graph:
    if kind == "petersen":
        verts = list(itertools.combinations(range(5), 2))
        edges = [
            (i, j)
            for i, j in itertools.combinations(range(10), 2)
            if not set(verts[i]) & set(verts[j])
        ]
        return build_graph(10, edges)
    if n is None:
        raise ConstructionError(f"{kind} graph needs n")
    if kind == "complete":
        if n < 1:
            raise ConstructionError("complete graph needs n >= 1")
        return build_graph(n, itertools.combinations(range(n), 2))
    if kind == "cycle":
        if n < 3:
            raise ConstructionError("cycle needs n >= 3")
        return build_graph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "path":
        if n < 1:
            raise ConstructionError("path needs n >= 1")
        return build_graph(n, [(i, i + 1) for i in range(n - 1)])
    raise ConstructionError(f"unknown graph kind {kind!r}")
