"""Threshold functions, their clones, and the randomized threshold-formula
construction over a single-threshold-gate basis.

The randomized construction assembles a complete (k+1)-ary tree of
``theta^{k+1}_k`` gates whose leaves are variables drawn uniformly from
``x_0..x_{N-1}``, where ``N = floor(t / sigma_k)`` and positions ``n..N-1``
are bound to the conjunction of all real inputs.  One gate maps an input
one-probability p to ``(k+1)p^k - kp^{k+1}``; the tree depth is chosen so
that the iterated map provably clears ``2^-(n+e)`` from both critical
starting weights, which certifies the failure bound without adopting any
unspecified constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import CapacityError, InputError, InternalError, StreamExhausted
from .funcore import (
    DE_MORGAN,
    Basis,
    BoolFun,
    CircuitBuilder,
    CircuitDAG,
    Node,
    TApp,
    TVar,
    Term,
    table_mask,
    theta_fun,
    theta_basis,
)
from .lattice import BOT, CloneDesc, named_desc

theta = theta_fun


# ---------------------------------------------------------------------------
# Sorting-network circuits for thresholds


def _merge_pairs(indices):
    if len(indices) < 2:
        return
    if len(indices) == 2:
        yield (indices[0], indices[1])
        return
    yield from _merge_pairs(indices[0::2])
    yield from _merge_pairs(indices[1::2])
    for x, y in zip(indices[1::2], indices[2::2]):
        yield (x, y)


def _sort_pairs(indices):
    if len(indices) < 2:
        return
    mid = len(indices) // 2
    yield from _sort_pairs(indices[:mid])
    yield from _sort_pairs(indices[mid:])
    yield from _merge_pairs(indices)


def sorting_network(n: int) -> list[tuple[int, int]]:
    """Batcher odd-even comparator list for n wires; each comparator (a, b)
    leaves the minimum on a and the maximum on b."""
    pot = 1 << max(0, (n - 1)).bit_length()
    pad = pot - n
    slots = [None] * (pad // 2) + list(range(n)) + [None] * ((pad + 1) // 2)
    return [
        (a, b)
        for a, b in _sort_pairs(slots)
        if a is not None and b is not None
    ]


def theta_circuit(n: int, t: int, basis: Basis = DE_MORGAN) -> CircuitDAG:
    """A threshold circuit built from a pairwise-merge sorting network,
    size O(n log^2 n)."""
    if not 0 <= t <= n + 1:
        raise InputError(f"threshold {t} out of range for arity {n}")
    b = CircuitBuilder(basis, n)
    if t == 0 or t == n + 1:
        x0 = b.var(0)
        nx0 = b.gate("NOT", [x0])
        out = b.gate("OR" if t == 0 else "AND", [x0, nx0])
        return b.finish(out)
    wires = [b.var(i) for i in range(n)]
    for lo, hi in sorting_network(n):
        wlo, whi = wires[lo], wires[hi]
        wires[lo] = b.gate("AND", [wlo, whi])
        wires[hi] = b.gate("OR", [wlo, whi])
    # Ascending sort: the ones occupy the top wires, so weight >= t iff
    # wire n-t carries a one.
    return b.finish(wires[n - t])


def theta_term(n: int, t: int, basis: Basis = DE_MORGAN) -> Term:
    """A threshold formula over {AND, OR, NOT} via the two-way recursion
    theta(n,t) = (x_{n-1} and theta(n-1,t-1)) or theta(n-1,t), with shared
    subterms."""
    if not 0 <= t <= n + 1:
        raise InputError(f"threshold {t} out of range for arity {n}")
    true_node: Node = TApp("OR", (TVar(0), TApp("NOT", (TVar(0),))))
    false_node: Node = TApp("AND", (TVar(0), TApp("NOT", (TVar(0),))))
    memo: dict[tuple[int, int], Node] = {}

    def go(m: int, s: int) -> Node:
        if s <= 0:
            return true_node
        if s > m:
            return false_node
        key = (m, s)
        if key in memo:
            return memo[key]
        if m == 1:
            node: Node = TVar(0)
        elif s == m:
            node = TApp("AND", (TVar(m - 1), go(m - 1, s - 1)))
        else:
            with_last = TApp("AND", (TVar(m - 1), go(m - 1, s - 1)))
            node = TApp("OR", (with_last, go(m - 1, s)))
        memo[key] = node
        return node

    return Term(basis, n, go(n, t))


def threshold_clone(n: int, t: int) -> CloneDesc:
    """Closed-form clone of theta^n_t."""
    if n < 1 or not 0 <= t <= n + 1:
        raise InputError(f"bad threshold parameters ({n}, {t})")
    if t == 0:
        return named_desc("UP1")
    if t == n + 1:
        return named_desc("UP0")
    if n == 1:  # t == 1: the identity
        return BOT
    if t == 1:
        return named_desc("VP")
    if t == n:
        return named_desc("EP")
    if 2 * t == n + 1:
        return named_desc("DM")
    if 2 * t <= n:
        return named_desc(f"MPT^{(n - 1) // (t - 1)}_1")
    return named_desc(f"MPT^{-(-t // (n - t))}_0")


# ---------------------------------------------------------------------------
# The amplification map and its fixed point


def amp_step(k: int, p: float) -> float:
    """One theta^{k+1}_k gate over iid inputs: p -> (k+1)p^k - kp^{k+1}."""
    return (k + 1) * p**k - k * p ** (k + 1)


def sigma(k: int) -> float:
    """The unique interior fixed point of the amplification map, located by
    bisection on (1/2, 1) to within 1e-12."""
    if k < 3:
        raise InputError("amplification needs k >= 3")
    lo, hi = 0.5, 1.0 - 1e-13
    if not (amp_step(k, lo) - lo < 0 < amp_step(k, hi) - hi):
        raise InternalError("bisection bracket failed")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if amp_step(k, mid) - mid < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AmplifierParams:
    """Gate fan-in parameter and the fixed point of its amplification map."""

    k: int
    sigma: float

    def __post_init__(self):
        if not 0.5 < self.sigma < 1.0:
            raise InputError("sigma out of range")
        if abs(amp_step(self.k, self.sigma) - self.sigma) > 1e-12:
            raise InputError("sigma is not a fixed point to tolerance")

    @staticmethod
    def for_k(k: int) -> "AmplifierParams":
        return AmplifierParams(k, sigma(k))


def recurrence(k: int, p0: float, d: int) -> float:
    """d-fold iterate of the amplification map starting at p0."""
    if not 0.0 <= p0 <= 1.0:
        raise InputError("p0 must lie in [0, 1]")
    p = p0
    for _ in range(d):
        p = amp_step(k, p)
    return p


# ---------------------------------------------------------------------------
# Exact integer placement of N and the threshold index


def _scaled_poly(k: int, t: int, x: int) -> int:
    """x^k - (k+1) t^{k-1} x + k t^k, exact; negative exactly on the open
    interval (t, t/sigma_k)."""
    return x**k - (k + 1) * t ** (k - 1) * x + k * t**k


def _sigma_n_below_t(k: int, n: int, t: int) -> bool:
    """Exact test for sigma_k * n < t (n, t positive integers)."""
    if n <= t:
        return True  # sigma < 1
    return _scaled_poly(k, t, n) < 0


def pick_N(k: int, t: int, n: int) -> int:
    """N = floor(t / sigma_k), by an integer sign-change scan; requires
    sigma_k * n < t <= n."""
    if k < 3:
        raise InputError("amplification needs k >= 3")
    if not (1 <= t <= n):
        raise InputError(f"need sigma*n < t <= n, got t={t}, n={n}")
    if not _sigma_n_below_t(k, n, t):
        raise InputError(f"precondition sigma_{k}*{n} < {t} fails")
    for x in range(n, 2 * t + 1):
        if _scaled_poly(k, t, x) > 0:
            N = x - 1
            break
    else:
        raise InternalError("no sign change up to 2t; sigma^{-1} < 2 failed")
    if N < n:
        raise InternalError("picked N below n")
    # ceil(sigma*N) == t, verified exactly.
    if not _sigma_times_below(k, N, t):
        raise InternalError("postcondition sigma*N < t failed")
    if t > 1 and not _sigma_times_above(k, N, t - 1):
        raise InternalError("postcondition sigma*N > t-1 failed")
    return N


def _sigma_times_below(k: int, N: int, t: int) -> bool:
    """sigma_k * N < t, exactly."""
    if N <= t:
        return True
    return _scaled_poly(k, t, N) < 0


def _sigma_times_above(k: int, N: int, s: int) -> bool:
    """sigma_k * N > s, exactly (s >= 1)."""
    if N <= s:
        return False
    return _scaled_poly(k, s, N) > 0


def threshold_index(k: int, N: int) -> int:
    """t = ceil(sigma_k * N), with exact integer verification."""
    c = int(-(-sigma(k) * N // 1))
    for t in (c - 1, c, c + 1):
        if t < 1 or t > N:
            continue
        if _sigma_times_below(k, N, t) and (
            t == 1 or _sigma_times_above(k, N, t - 1)
        ):
            return t
    raise InternalError("could not certify ceil(sigma*N)")


_DEPTH_CAP = 1_000_000


def choose_depth(k: int, N: int, n: int, e: int) -> int:
    """Least depth d such that iterating the amplification map from both
    critical starting weights (t-1)/N and t/N (t = ceil(sigma*N)) lands
    within 2^-(n+e) of 0 and 1 respectively.  All other weights converge at
    least as fast by monotonicity of the map."""
    if e < 0:
        raise InputError("e must be >= 0")
    target = 2.0 ** (-(n + e))
    if target == 0.0:
        raise CapacityError("2^-(n+e) underflows; n+e too large")
    t = threshold_index(k, N)
    p_lo = (t - 1) / N
    p_hi = t / N
    d = 0
    while not (p_lo <= target and 1.0 - p_hi <= target):
        p_lo = amp_step(k, p_lo)
        p_hi = amp_step(k, p_hi)
        d += 1
        if d > _DEPTH_CAP:
            raise InternalError("depth search did not converge")
    return d


# ---------------------------------------------------------------------------
# Random bit streams


_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _xorshift64star_bytes(seed: int, nbytes: int) -> bytes:
    """Documented seed expander (non-paper convenience): xorshift64* with
    multiplier 2685821657736338717, state seeded by seed + golden ratio."""
    x = (seed + _GOLDEN) & _M64
    if x == 0:
        x = _GOLDEN
    out = bytearray()
    while len(out) < nbytes:
        x ^= x >> 12
        x = (x ^ (x << 25)) & _M64
        x ^= x >> 27
        out += ((x * 2685821657736338717) & _M64).to_bytes(8, "big")
    return bytes(out[:nbytes])


class RandomStream:
    """A finite bit string consumed left to right; exhaustion raises, never
    wraps around silently."""

    def __init__(self, data: bytes, nbits: Optional[int] = None):
        self._bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if nbits is not None:
            if nbits > len(self._bits):
                raise InputError("nbits exceeds the provided data")
            self._bits = self._bits[:nbits]
        self.cursor = 0

    @classmethod
    def from_hex(cls, text: str) -> "RandomStream":
        text = text.strip()
        if len(text) % 2:
            text += "0"
        try:
            return cls(bytes.fromhex(text))
        except ValueError:
            raise InputError(f"bad hex stream {text!r}")

    @classmethod
    def from_seed(cls, seed: int, nbits: int) -> "RandomStream":
        return cls(_xorshift64star_bytes(seed, (nbits + 7) // 8), nbits)

    def __len__(self) -> int:
        return len(self._bits)

    def remaining(self) -> int:
        return len(self._bits) - self.cursor

    def take(self, k: int) -> int:
        """Next k bits as an integer, first-consumed bit most significant."""
        if self.remaining() < k:
            raise StreamExhausted(
                f"needed {k} bits, only {self.remaining()} left"
            )
        out = 0
        for b in self._bits[self.cursor:self.cursor + k]:
            out = (out << 1) | int(b)
        self.cursor += k
        return out

    def take_uniform_many(self, count: int, n_choices: int) -> np.ndarray:
        """``count`` uniform draws from range(n_choices).

        Each draw consumes aligned ceil(log2(n_choices))-bit chunks,
        rejecting chunk values >= n_choices; identical to per-draw rejection
        sampling because rejected chunks are skipped whole.
        """
        if n_choices < 1:
            raise InputError("need at least one choice")
        if count == 0:
            return np.zeros(0, dtype=np.int64)
        b = (n_choices - 1).bit_length()
        if b == 0:
            return np.zeros(count, dtype=np.int64)
        avail = self.remaining() // b
        if avail == 0:
            raise StreamExhausted("stream too short for any draw")
        chunk_bits = self._bits[self.cursor:self.cursor + avail * b]
        vals = np.zeros(avail, dtype=np.int64)
        chunk_bits = chunk_bits.reshape(avail, b)
        for j in range(b):
            vals = (vals << 1) | chunk_bits[:, j]
        ok = vals < n_choices
        accepted_positions = np.nonzero(ok)[0]
        if len(accepted_positions) < count:
            raise StreamExhausted(
                f"stream exhausted after {len(accepted_positions)} of "
                f"{count} draws"
            )
        used = int(accepted_positions[count - 1]) + 1
        out = vals[accepted_positions[:count]]
        self.cursor += used * b
        return out

    def take_uniform(self, n_choices: int) -> int:
        return int(self.take_uniform_many(1, n_choices)[0])


# ---------------------------------------------------------------------------
# The randomized threshold formula


@dataclass(frozen=True)
class FormulaShape:
    """Derived parameters of one randomized threshold formula."""

    k: int
    n: int
    t: int
    e: int
    N: int
    depth: int

    @property
    def leaf_count(self) -> int:
        return (self.k + 1) ** self.depth

    @property
    def bits_per_draw(self) -> int:
        return (self.N - 1).bit_length()


def formula_shape(n: int, t: int, e: int, k: int,
                  depth_override: Optional[int] = None) -> FormulaShape:
    """Derived construction parameters.

    ``depth_override`` truncates the tree below the certified depth for
    measurement runs; the 2^-e failure bound is void under an override.
    """
    if k < 3:
        raise InputError("construction needs k >= 3")
    if not (1 <= t <= n):
        raise InputError(f"need sigma*n < t <= n, got t={t}, n={n}")
    N = pick_N(k, t, n)
    d = choose_depth(k, N, n, e) if depth_override is None else depth_override
    if d < 0:
        raise InputError("depth override must be >= 0")
    return FormulaShape(k, n, t, e, N, d)


def _and_pad_node(k: int, n: int) -> Node:
    """Conjunction of x_0..x_{n-1} over the theta^{k+1}_k gate: AND(a,b) is
    the gate applied to k-1 copies of a and 2 of b."""
    gate = f"THETA_{k + 1}_{k}"

    def and2(a: Node, b: Node) -> Node:
        return TApp(gate, tuple([a] * (k - 1) + [b, b]))

    nodes: list[Node] = [TVar(i) for i in range(n)]
    while len(nodes) > 1:
        nxt = []
        for i in range(0, len(nodes) - 1, 2):
            nxt.append(and2(nodes[i], nodes[i + 1]))
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    return nodes[0]


def sample_leaves(shape: FormulaShape, stream: RandomStream) -> np.ndarray:
    """Leaf variable indices in left-to-right tree order."""
    return stream.take_uniform_many(shape.leaf_count, shape.N)


_LEAF_CAP = 1 << 22


def random_threshold_formula(
    n: int, t: int, e: int, stream: RandomStream, k: int = 3,
    depth_override: Optional[int] = None,
) -> Term:
    """The randomized threshold formula as an explicit term over the
    theta^{k+1}_k basis; deterministic given (n, t, e, stream, k)."""
    shape = formula_shape(n, t, e, k, depth_override)
    if shape.leaf_count > _LEAF_CAP:
        raise CapacityError(
            f"materializing {shape.leaf_count} leaves exceeds the term cap; "
            "use the sampled evaluation path"
        )
    leaves = sample_leaves(shape, stream)
    basis = theta_basis(k)
    gate = basis.gates[0][0]
    pad = _and_pad_node(k, n)
    level: list[Node] = [
        TVar(int(j)) if j < n else pad for j in leaves.tolist()
    ]
    width = k + 1
    while len(level) > 1:
        level = [
            TApp(gate, tuple(level[i:i + width]))
            for i in range(0, len(level), width)
        ]
    return Term(basis, n, level[0])


# ---------------------------------------------------------------------------
# Fast sampled evaluation (no term materialization)


def _int_to_words(value: int, nwords: int) -> np.ndarray:
    return np.frombuffer(
        value.to_bytes(nwords * 8, "little"), dtype=np.uint64
    ).copy()


def _words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(words.tobytes(), "little")


def _theta_fold(level: np.ndarray, k: int) -> np.ndarray:
    """Apply theta^{k+1}_k to consecutive groups along axis 0; the gate is
    'at most one zero input': OR over i of AND of all inputs but i."""
    groups = level.reshape(-1, k + 1, level.shape[-1])
    if k == 3:
        a, b, c, d = (groups[:, i, :] for i in range(4))
        ab = a & b
        cd = c & d
        return (ab & (c | d)) | (cd & (a | b))
    width = k + 1
    prefix = [None] * (width + 1)
    suffix = [None] * (width + 1)
    ones = np.full(groups.shape[0::2], ~np.uint64(0))
    prefix[0] = ones
    suffix[width] = ones
    for i in range(width):
        prefix[i + 1] = prefix[i] & groups[:, i, :]
        suffix[width - 1 - i] = suffix[width - i] & groups[:, width - 1 - i, :]
    out = np.zeros_like(prefix[0])
    for i in range(width):
        out |= prefix[i] & suffix[i + 1]
    return out


def _leaf_tables(shape: FormulaShape) -> np.ndarray:
    n, N = shape.n, shape.N
    size = 1 << n
    nwords = (size + 63) // 64
    from .funcore import var_mask  # local import to avoid cycle noise

    x_tables = np.zeros((N, nwords), dtype=np.uint64)
    for j in range(N):
        if j < n:
            x_tables[j] = _int_to_words(var_mask(n, j), nwords)
        else:
            x_tables[j] = _int_to_words(1 << (size - 1), nwords)
    return x_tables


_BOTTOM_CACHE: dict = {}
_BOTTOM_COMBO_CAP = 200_000


def _bottom_lookup(shape: FormulaShape):
    """Precomputed outputs of one bottom-level gate for every sorted
    (k+1)-tuple of leaf indices (the gate is symmetric), shared across
    samples."""
    key = (shape.k, shape.n, shape.N)
    if key in _BOTTOM_CACHE:
        return _BOTTOM_CACHE[key]
    k, N = shape.k, shape.N
    import math

    combos = math.comb(N + k, k + 1)
    if combos > _BOTTOM_COMBO_CAP:
        _BOTTOM_CACHE[key] = None
        return None
    import itertools as it

    x_tables = _leaf_tables(shape)
    nwords = x_tables.shape[1]
    index_map = np.zeros(N ** (k + 1), dtype=np.int64)
    rows = np.zeros((combos, nwords), dtype=np.uint64)
    weights = N ** np.arange(k, -1, -1, dtype=np.int64)
    for row_i, tup in enumerate(it.combinations_with_replacement(range(N), k + 1)):
        rows[row_i] = _theta_fold(x_tables[list(tup)], k)[0]
        code = int(np.dot(np.array(tup, dtype=np.int64), weights))
        index_map[code] = row_i
    result = (index_map, rows, weights)
    _BOTTOM_CACHE[key] = result
    return result


def sampled_formula_table(shape: FormulaShape, leaves: np.ndarray) -> BoolFun:
    """Truth table of the formula with the given leaf indices, evaluated
    bit-parallel over all 2^n assignments; semantically identical to
    truth_table(random_threshold_formula(...)) for the same draws."""
    n, k = shape.n, shape.k
    x_tables = _leaf_tables(shape)
    if shape.depth >= 2:
        lookup = _bottom_lookup(shape)
    else:
        lookup = None
    if lookup is not None and shape.depth >= 2:
        index_map, rows, weights = lookup
        quads = np.sort(leaves.reshape(-1, k + 1), axis=1)
        codes = quads @ weights
        level = rows[index_map[codes]]
    else:
        level = x_tables[leaves]
    while level.shape[0] > 1:
        level = _theta_fold(level, k)
    table = _words_to_int(level[0]) & table_mask(n)
    return BoolFun(n, table)


def success_rate(
    n: int, t: int, e: int, k: int, streams: Iterable[RandomStream]
) -> tuple[int, int]:
    """(exact matches, samples) of the construction against theta^n_t."""
    shape = formula_shape(n, t, e, k)
    want = theta_fun(n, t)
    hits = total = 0
    for stream in streams:
        leaves = sample_leaves(shape, stream)
        got = sampled_formula_table(shape, leaves)
        hits += got == want
        total += 1
    return hits, total


def gate_tree_acceptance(
    k: int, depth: int, leaf_values: np.ndarray
) -> np.ndarray:
    """Evaluate complete (k+1)-ary theta^{k+1}_k trees of the given depth on
    0/1 leaf values, vectorized over samples (rows)."""
    level = leaf_values.astype(np.int8)
    for _ in range(depth):
        grouped = level.reshape(level.shape[0], -1, k + 1)
        level = (grouped.sum(axis=2) >= k).astype(np.int8)
    return level[:, 0].astype(bool)
