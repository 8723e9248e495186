"""Stark-shift spectroscopy of qubit T1 fluctuations from a diffusing TLS bath.

Simulation of a transmon coupled to drifting two-level defects, the Stark
scan / T1 measurement protocol, the frequency-time T1 estimators, and the
statistics and tracking tools used to analyse the resulting data.
"""

__version__ = "0.1.0"

from .model import (
    RATE_PER_MHZ,
    BathState,
    PoleProximityError,
    QubitModel,
    SignInfeasibleError,
    StarkTone,
    TlsDefect,
    amplitude_for_shift,
    bath_from_freqs,
    evolve_bath,
    initial_bath,
    random_bath,
    random_device,
    relaxation_rate,
    shift_per_amp2,
    stark_shift,
)
from .protocol import (
    CampaignResult,
    FitError,
    ScanGrid,
    Schedule,
    SpectroscopyMap,
    T1TimeSeries,
    fit_exponential_decay,
    fit_stark_curve,
    measure_p1,
    measure_t1,
    ramsey_calibrate,
    run_campaign,
    spectroscopy_scan,
)
from .estimators import (
    EstimateResult,
    EstimatorConfig,
    EstimatorError,
    ensemble_estimator,
    heuristic_delta_omega,
    mean_p1_freq_time,
    mean_p1_over_time,
    mean_t1_freq_time,
    mean_t1_over_time,
    moving_average,
    p1_to_t1,
    single_instance_t1,
    t1_to_p1,
)
from .tracking import (
    TrackConfig,
    accumulate_tracks,
    diffusivities,
    extract_minima,
    fit_linewidth,
    fit_tracks,
    linewidth_vs_time,
)
