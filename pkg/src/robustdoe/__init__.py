"""Model-robust evaluation and construction of two-level factorial designs.

The package evaluates designs by averaging estimation and prediction
efficiency over all strong-heredity submodels of a maximal model (exactly,
via information-matrix inversion, or through a fast squared-aliasing
approximation), links the approximation to generalized wordlength patterns in
closed form, and constructs robust saturated and supersaturated designs with
a columnwise-pairwise search.
"""

from .approx import (
    ProjectionTildeReport,
    RTable,
    TildeValues,
    projection_average_tilde,
    projection_values_tilde,
    r_table,
    tilde_criteria,
)
from .bridge import (
    BridgeValue,
    XiSet,
    bridge_first_order,
    bridge_second_order,
    orthogonal_baseline,
    tilde_via_bridge,
    verify_bridge,
    xi_from_weights,
)
from .catalog import catalog_labels, load_fixture, verify_checksums
from .design import (
    Design,
    Gwlp,
    design_to_text,
    e_s2,
    gma_compare,
    gwlp,
    j_characteristic,
    load_design,
    model_matrix,
    parse_design,
    project,
)
from .errors import (
    AllInestimableError,
    CapacityError,
    DegeneratePriorError,
    DesignDimensionError,
    DesignFormatError,
    SymmetryError,
)
from .exact import (
    ExactReport,
    ModelEval,
    ProjectionExactReport,
    exact_criteria,
    projection_average_exact,
    trace_h,
    trace_ig,
)
from .models import (
    MaximalModel,
    PriorSpec,
    Submodel,
    WeightTable,
    count_submodels,
    enumerate_submodels,
    model_prior,
    weight_table,
    weight_table_enumerated,
    weight_table_exchangeable,
)
from .ranking import rank_correlation, rank_min_ties
from .search import (
    MoveRecord,
    RestartTrace,
    SearchConfig,
    SearchResult,
    cpw_search,
    first_order_adjustments,
    random_balanced_design,
    reorder_columns,
)

__version__ = "0.1.0"
