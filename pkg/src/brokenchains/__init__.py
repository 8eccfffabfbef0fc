"""Unembedding toolkit for chained-qubit annealer samples.

The package builds QUBO/Ising models for four NP-hard graph problems,
compiles them onto a Chimera hardware graph through a complete-graph
minor embedding, draws samples with a classical simulated annealer (or a
controlled chain-break injector), and resolves broken chains with three
generic strategies plus one problem-tailored algorithm per problem.
"""

from brokenchains.graphs import (
    Graph,
    Bipartition,
    erdos_renyi,
    complement,
    is_clique,
    is_vertex_cover,
    cut_size,
    brute_force,
)
from brokenchains.bqm import (
    QUBO,
    ISING,
    BinaryQuadraticModel,
    energy,
    convert,
    build_max_clique_qubo,
    build_min_vertex_cover_qubo,
    build_max_cut_ising,
    build_graph_partitioning_ising,
    scale_to_unit_range,
)
from brokenchains.topology import (
    HardwareGraph,
    Embedding,
    PhysicalModel,
    chimera,
    clique_embedding,
    validate_embedding,
    uniform_torque_compensation,
    embed_bqm,
)
from brokenchains.sampler import (
    AnnealParams,
    PhysicalSample,
    SampleSet,
    simulated_anneal,
    inject_chain_breaks,
)
from brokenchains.unembed import (
    ChainReadout,
    LogicalSample,
    UnembedContext,
    decompose,
    majority_vote,
    random_weighted,
    minimize_energy,
    unembed_max_clique,
    unembed_max_cut,
    unembed_graph_partitioning,
    unembed_vertex_cover,
)

__version__ = "0.1.0"
