from .correlation import (
    CorrelationError,
    PearsonResult,
    RConvergence,
    RSimConfig,
    RSurface,
    analytic_r,
    pearson_r,
    r_vs_window,
    sample_analytic_r,
    simulate_r_convergence,
)
from .ergodicity import (
    ErgodicityError,
    ErgodicityReport,
    PartitionResult,
    ergodicity_partition_test,
    runs_test,
    t_test_two_sample,
    welch_t_test,
)
from .timeseries import (
    ADFResult,
    FrequencyACF,
    MomentsReport,
    SeriesError,
    adf_test,
    autocorrelation,
    frequency_autocorrelation,
    mackinnon_critical,
    mackinnon_p,
    moments_and_normality,
)
