"""Binary echo-state network on a simulated light-scattering medium.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (  # noqa: F401
    CameraModel,
    DmdFrame,
    ExperimentConfig,
    MgParams,
    MgSeries,
    ReadoutModel,
    ReservoirConfig,
    ReservoirState,
    RidgeConfig,
    RunReport,
    SpeckleFrame,
    StateHistory,
    SupervisedSeries,
    SweepEntry,
    ThermometerEncoder,
    ThresholdConfig,
    ThresholdMode,
    ThroughputRecord,
    TransferMatrix,
    __version__,
    activate,
    assemble_frame,
    bench_throughput,
    build_transfer_matrix,
    calibrate,
    calibrate_gain,
    compute_speckle,
    compute_speckle_batch,
    encode,
    fit,
    generate_mackey_glass,
    init_state,
    instance_seed,
    load_config,
    make_supervised,
    memory_budget_bytes,
    num_threads,
    parse_config_json,
    predict,
    quantize,
    run,
    run_experiment,
    run_parallel,
    run_size_sweep,
    score,
    set_memory_budget_bytes,
    set_num_threads,
    step,
    write_series_csv,
)
