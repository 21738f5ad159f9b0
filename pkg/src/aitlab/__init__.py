"""aitlab: a desk-scale laboratory for exact time-bounded complexity.

One fixed micro-machine, exhaustive program enumeration, and the
counting structures built on top of it: dependency sets and degrees,
mutual-dependency graphs with greedy independent sets, covering sets,
and popular-preimage counting certificates for pluggable two-source
function tables.
"""

from .bits import Bits, all_strings
from .codec import DecodeError, decode_pair, decode_self_delim, encode_pair, encode_self_delim
from .complexity import (
    DEFAULT_BUDGET,
    SENTINEL,
    ComplexityTable,
    SlackReport,
    TableStore,
    Witness,
    build_table,
    complexity,
    condition_for_length,
    info,
    load_table,
    save_table,
    shortest_description,
    soi_report,
)
from .covering import (
    CoverCandidate,
    CoverVerdict,
    cover_size_lower_bound,
    greedy_covering,
    load_cover,
    random_covering,
    save_cover,
    verify_covering,
)
from .depsets import (
    DegreeResult,
    DepParams,
    DepSetResult,
    WitnessFamily,
    a_size_bound,
    containment_report,
    dep_degree,
    dep_set_A,
    dep_set_A_restricted,
    dep_set_B,
    log_threshold,
    thm1_witnesses,
    witness_family,
)
from .errors import (
    CacheError,
    LabError,
    PreconditionError,
    ResourceRefusal,
    TableRequiredError,
)
from .extractor import (
    Certificate,
    CountParams,
    ExtractorTable,
    Partition,
    PopularImage,
    bad_partition,
    load_extractor,
    lower_bound_certificate,
    make_constant_extractor,
    make_random_extractor,
    most_popular_image,
    save_extractor,
)
from .independence import (
    DepGraph,
    IntersectionReport,
    PairwiseReport,
    TupleReport,
    build_dep_graph,
    caro_wei_bound,
    caro_wei_independent_set,
    check_mutual_independent,
    check_pairwise_independent,
    concat_deficiency,
    independent_in,
    intersect_dep_sets,
    random_graph,
)
from .machine import (
    C_CONDCOPY,
    C_LITERAL,
    C_OVERHEAD,
    MACHINE,
    VERSION_ID,
    MachineSpec,
    RunOutcome,
    RunStatus,
    enumerate_programs,
    run,
)

__version__ = "0.1.0"
