"""Many-to-one growth contagion analysis for trade-credit networks."""

__version__ = "0.1.0"

from .growth import (  # noqa: E402
    PERIODS,
    CagrPoint,
    GrowthPoint,
    Period,
    actual_log_growth,
    build_scatter,
    cagr_points,
    predicted_log_growth,
    scatter_stats,
)
from .ingest import (  # noqa: E402
    BalanceRecord,
    Dataset,
    InvoiceRecord,
    SectorCode,
    assemble_dataset,
    load_dataset,
    parse_balance,
    parse_invoices,
)
from .network import (  # noqa: E402
    TradeNetwork,
    build_network,
    degree_sequences,
    filter_by_matching,
    key_customer,
    matching_ratio,
    network_summary,
    weak_components,
)
from .stats import (  # noqa: E402
    ccdf_points,
    fit_ccdf_slope,
    grouped_correlations,
    pearson,
    rating_class,
    size_degree_regression,
)
from .synth import PlantedTruth, SynthConfig, generate, scenario_boom_bust  # noqa: E402
