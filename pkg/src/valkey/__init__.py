"""valkey: exact key-polynomial calculus for valuations on K[x].

Base fields are the rationals with a p-adic valuation (``qp:<p>``) and
rational functions over F_p with the t-adic valuation (``fpt:<p>``).  All
arithmetic is exact; values live in Q together with a distinguished INF.
"""

from .errors import (
    BudgetExhausted,
    DegenerateConstant,
    Indeterminate,
    LimitInK,
    NonSimpleRoot,
    NotFixed,
    Unsupported,
    ValkeyError,
)
from .fields import PAdicField, RatFunc, TSeriesField, ValuedField, parse_field
from .grid import DEFAULT_GRID, Grid
from .keypoly import (
    Certified,
    Falsified,
    UnknownKey,
    alpha_psi,
    build_complete_set,
    classify_limit,
    epsilon,
    is_key,
    support_set,
    truncate,
)
from .limits import verify_theorem_1_2, verify_truncation_agreement
from .pcs import (
    HenselGenerator,
    PcsPrefix,
    SeriesGenerator,
    check_pcs,
    classify_type,
    dominant_index,
    fixed_value,
    hensel_generator,
    parse_generator,
)
from .poly import Factor, Irreducible, Poly, hasse_derivative, irreducible_bounded, q_expansion, taylor_expansion
from .values import INF, ext_compare, format_value, parse_value
from .xval import (
    AugmentedValuation,
    GaussValuation,
    RootValuation,
    SeriesValuation,
    chain_describe,
    parse_valuation,
    validate,
    xval_eval,
)

__version__ = "0.1.0"
