"""Chimera hardware graphs, complete-graph minor embedding, model compilation.

A Chimera graph is an m x n grid of unit cells, each a complete bipartite
K_{t,t} between a horizontal shore (couples to the same-index qubit in the
cell to the right) and a vertical shore (couples to the cell below).
Qubit ids are linear: ``((row * n + col) * 2 + shore) * t + index`` with
shore 0 horizontal and shore 1 vertical.
"""

import json
import math
from dataclasses import dataclass, field

from brokenchains.bqm import ISING, BinaryQuadraticModel, convert
from brokenchains.graphs import Graph

HORIZONTAL = 0
VERTICAL = 1


@dataclass(frozen=True)
class HardwareGraph:
    qubits: frozenset
    couplers: frozenset
    shape: tuple  # (rows m, cols n, shore t)

    def __post_init__(self):
        object.__setattr__(self, "qubits", frozenset(self.qubits))
        object.__setattr__(
            self, "couplers", frozenset(tuple(sorted(c)) for c in self.couplers)
        )
        for p, q in self.couplers:
            if p == q:
                raise ValueError(f"self-coupler on qubit {p}")
            if p not in self.qubits or q not in self.qubits:
                raise ValueError(f"coupler ({p}, {q}) references missing qubit")

    def adjacency(self) -> dict:
        adj = {q: set() for q in self.qubits}
        for p, q in self.couplers:
            adj[p].add(q)
            adj[q].add(p)
        return adj

    def has_coupler(self, p: int, q: int) -> bool:
        return (min(p, q), max(p, q)) in self.couplers


def chimera_qubit(m: int, n: int, t: int, row: int, col: int, shore: int, k: int) -> int:
    return ((row * n + col) * 2 + shore) * t + k


def chimera(m: int, n: int, t: int) -> HardwareGraph:
    """Chimera graph with ``m * n`` cells of ``2t`` qubits each."""
    if m < 1 or n < 1 or t < 1:
        raise ValueError("chimera dimensions must be positive")

    def q(row, col, shore, k):
        return chimera_qubit(m, n, t, row, col, shore, k)

    qubits = range(2 * t * m * n)
    couplers = []
    for row in range(m):
        for col in range(n):
            for i in range(t):
                for j in range(t):
                    couplers.append((q(row, col, HORIZONTAL, i), q(row, col, VERTICAL, j)))
            for k in range(t):
                if col + 1 < n:
                    couplers.append((q(row, col, HORIZONTAL, k), q(row, col + 1, HORIZONTAL, k)))
                if row + 1 < m:
                    couplers.append((q(row, col, VERTICAL, k), q(row + 1, col, VERTICAL, k)))
    return HardwareGraph(frozenset(qubits), frozenset(couplers), (m, n, t))


@dataclass(frozen=True)
class Embedding:
    """Map from logical variable id to its chain of physical qubit ids."""

    chains: dict

    def __post_init__(self):
        object.__setattr__(
            self, "chains", {int(v): tuple(c) for v, c in self.chains.items()}
        )

    def variables(self):
        return sorted(self.chains)

    def chain(self, v: int) -> tuple:
        return self.chains[v]

    def all_qubits(self) -> set:
        return {q for chain in self.chains.values() for q in chain}

    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains.values()), default=0)


def identity_embedding(variables) -> Embedding:
    """One single-qubit chain per variable (qubit id = variable id)."""
    return Embedding({v: (v,) for v in variables})


def clique_embedding(k: int, hw: HardwareGraph) -> Embedding:
    """Deterministic embedding of the complete graph K_k into a square Chimera.

    For k <= t*m the chains live in the smallest sufficient ceil(k/t) x
    ceil(k/t) top-left block: chain (b, a) bends at diagonal cell (b, b),
    running up column b on vertical-shore index a and right along row b on
    horizontal-shore index a, so every chain has length block+1 and any two
    chains meet inside a shared cell.

    For k = t*m + 1 the bends of shore index t-1 are replaced by m+1
    staircase chains: a full top row, a full rightmost column, and one
    chain per remaining row s pairing column s-1 (rows 0..s) with row s
    (columns s-1 onward).  That yields t*m + 1 pairwise-coupled chains with
    maximum length m+2; shorter chains for this clique size do not exist.
    """
    m, n, t = hw.shape
    if m != n:
        raise ValueError(f"clique embedding requires a square Chimera, got {m}x{n}")
    if k < 1:
        raise ValueError("clique size must be >= 1")
    if k > t * m + 1:
        raise ValueError(f"K_{k} exceeds capacity {t * m + 1} of chimera({m},{m},{t})")

    def hq(row, col, a):
        return chimera_qubit(m, n, t, row, col, HORIZONTAL, a)

    def vq(row, col, a):
        return chimera_qubit(m, n, t, row, col, VERTICAL, a)

    chains = {}
    if k <= t * m:
        size = max(1, math.ceil(k / t))
        for i in range(k):
            b, a = divmod(i, t)
            chains[i] = tuple(
                [vq(r, b, a) for r in range(b + 1)]
                + [hq(b, c, a) for c in range(b, size)]
            )
        return Embedding(chains)

    # k == t*m + 1: triangle on shore indices 0..t-2 plus staircase chains
    i = 0
    for b in range(m):
        for a in range(t - 1):
            chains[i] = tuple(
                [vq(r, b, a) for r in range(b + 1)]
                + [hq(b, c, a) for c in range(b, m)]
            )
            i += 1
    a = t - 1
    chains[i] = tuple(hq(0, c, a) for c in range(m))  # full top row
    i += 1
    for s in range(1, m):
        chains[i] = tuple(
            [vq(r, s - 1, a) for r in range(s + 1)]
            + [hq(s, c, a) for c in range(s - 1, m)]
        )
        i += 1
    chains[i] = tuple(vq(r, m - 1, a) for r in range(m))  # full rightmost column
    return Embedding(chains)


def validate_embedding(e: Embedding, logical: Graph, hw: HardwareGraph):
    """List of violation strings; empty when the embedding is a valid minor.

    Checks chain qubits exist in the hardware graph, chains are nonempty
    and pairwise disjoint, each chain induces a connected subgraph, and
    every logical edge has at least one coupler between its two chains.
    """
    violations = []
    adj = hw.adjacency()
    seen = {}
    for v in e.variables():
        chain = e.chain(v)
        if not chain:
            violations.append(f"chain {v} is empty")
            continue
        if len(set(chain)) != len(chain):
            violations.append(f"chain {v} repeats a qubit")
        for q in chain:
            if q not in hw.qubits:
                violations.append(f"chain {v} uses qubit {q} absent from hardware")
            elif q in seen:
                violations.append(f"chains {seen[q]} and {v} overlap on qubit {q}")
            else:
                seen[q] = v
        members = set(chain)
        if all(q in hw.qubits for q in chain):
            frontier = [chain[0]]
            reached = {chain[0]}
            while frontier:
                q = frontier.pop()
                for nb in adj[q]:
                    if nb in members and nb not in reached:
                        reached.add(nb)
                        frontier.append(nb)
            if reached != members:
                violations.append(f"chain {v} is disconnected")
    for u, v in sorted(logical.edges):
        if u not in e.chains or v not in e.chains:
            violations.append(f"logical edge ({u}, {v}) has an unmapped endpoint")
            continue
        cu, cv = set(e.chain(u)), set(e.chain(v))
        if not any(nb in cv for q in cu if q in adj for nb in adj[q]):
            violations.append(f"logical edge ({u}, {v}) has no inter-chain coupler")
    return violations


def uniform_torque_compensation(
    m: BinaryQuadraticModel,
    logical: Graph | None = None,
    prefactor: float = 1.414,
) -> float:
    """Chain strength heuristic: prefactor * RMS(|couplers|) * sqrt(avg degree).

    The model is converted to Ising form first.  Average degree is taken
    from the model's interaction graph unless an explicit logical graph is
    supplied.  Models with no quadratic terms fall back to ``prefactor``.
    """
    ising = convert(m, ISING)
    couplers = [c for c in ising.quadratic.values() if c != 0.0]
    if not couplers:
        return prefactor * 1.0
    rms = math.sqrt(sum(c * c for c in couplers) / len(couplers))
    if logical is not None:
        degrees = [logical.degree(v) for v in logical.vertices()]
    else:
        degrees = list(ising.degrees().values())
    avg_degree = sum(degrees) / len(degrees) if degrees else 1.0
    return prefactor * rms * math.sqrt(avg_degree)


@dataclass(frozen=True)
class PhysicalModel:
    """Ising model over physical qubits plus the embedding that produced it."""

    ising: BinaryQuadraticModel
    chain_strength: float
    source_embedding: Embedding
    intra_chain_couplers: tuple = field(default=())

    def qubits(self):
        return self.ising.variables()


def embed_bqm(
    m: BinaryQuadraticModel,
    e: Embedding,
    hw: HardwareGraph,
    chain_strength: float,
) -> PhysicalModel:
    """Compile a logical Ising model onto hardware through an embedding.

    Logical linear biases are split equally across chain qubits; each
    logical coupler is split equally across *all* physical couplers joining
    the two chains; every hardware coupler inside a chain is set to
    ``-chain_strength``.  For any chain-consistent physical assignment the
    physical energy equals the logical energy minus ``chain_strength``
    times the number of intra-chain couplers.
    """
    if m.domain != ISING:
        raise ValueError("embed_bqm requires an Ising model; convert QUBO input first")
    if chain_strength <= 0:
        raise ValueError("chain strength must be positive")
    problems = validate_embedding(e, m.interaction_graph(), hw)
    if problems:
        raise ValueError("invalid embedding: " + "; ".join(problems))

    linear = {}
    for v, h in m.linear.items():
        chain = e.chain(v)
        share = h / len(chain)
        for q in chain:
            linear[q] = linear.get(q, 0.0) + share

    quadratic = {}
    for (u, v), j in m.quadratic.items():
        if j == 0.0:
            continue
        links = [
            (p, q)
            for p in e.chain(u)
            for q in e.chain(v)
            if hw.has_coupler(p, q)
        ]
        share = j / len(links)
        for p, q in links:
            key = (min(p, q), max(p, q))
            quadratic[key] = quadratic.get(key, 0.0) + share

    intra = []
    for v in e.variables():
        chain = e.chain(v)
        for i, p in enumerate(chain):
            for q in chain[i + 1:]:
                if hw.has_coupler(p, q):
                    key = (min(p, q), max(p, q))
                    quadratic[key] = -chain_strength
                    intra.append(key)

    physical = BinaryQuadraticModel(ISING, linear, quadratic, m.offset)
    return PhysicalModel(physical, chain_strength, e, tuple(sorted(intra)))


def embedding_to_json(e: Embedding) -> str:
    return json.dumps(
        {str(v): list(e.chain(v)) for v in e.variables()}, indent=2, sort_keys=True
    )


def embedding_from_json(text: str) -> Embedding:
    doc = json.loads(text)
    return Embedding({int(v): tuple(chain) for v, chain in doc.items()})
