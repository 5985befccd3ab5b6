import numpy as np
import pytest

from gridloc import (ExperimentConfig, GridMagnitudes, GridModel,
                     OptimizerSettings, SWEEP_AXES, SweepRunner, sweep)


def chain_susceptance(n, values):
    b = np.zeros((n, n))
    for i, v in enumerate(values):
        b[i, i + 1] = b[i + 1, i] = v
    return b


@pytest.fixture(scope="session")
def tiny_model():
    # 4-bus chain 1-3-4-2 with generators at the ends
    b = np.zeros((4, 4))
    for i, j, v in ((1, 3, 5.0), (3, 4, 4.0), (4, 2, 6.0)):
        b[i - 1, j - 1] = b[j - 1, i - 1] = v
    return GridModel(bus_count=4,
                     generator_buses=(1, 2),
                     inertia_s=(3.0, 4.0),
                     rating_mva=(500.0, 800.0),
                     damping_pu=(1.0, 1.0),
                     droop_gain=(20.0, 20.0),
                     governor_time_constant_s=(0.5, 0.5),
                     line_susceptance_pu=b)


@pytest.fixture(scope="session")
def tiny_experiment():
    # two disturbance buses and short traces so a full sweep runs in seconds
    return ExperimentConfig(
        disturbance_buses=(4, 20),
        train_magnitudes=GridMagnitudes(100.0, 900.0, 100.0),
        test_per_bus=2,
        validation_per_bus=2,
        no_disturbance_train=2,
        duration_s=1.2,
        noise_sigmas_hz=(0.0, 0.001),
        sampling_windows=(5, 20),
        averaging_windows=(1, 4),
        noiseless_windows=(1, 2),
        top_k=(1, 2, 40),
        missing_counts=(1, 2),
        masks_per_count=2,
        reference_sigma_hz=0.001,
        reference_sampling_window=20,
        lambda_grid=(0.01, 100.0),
        noiseless_lambda_grid=(1e-6, 1e-2),
        optimizer=OptimizerSettings(max_iterations=150),
        figure_window=60)


@pytest.fixture(scope="session")
def tiny_sweep(tiny_experiment, tmp_path_factory):
    outdir = tmp_path_factory.mktemp("sweep")
    runner = SweepRunner(tiny_experiment)
    rows = {}
    for axis in SWEEP_AXES:
        rows[axis], _ = sweep(tiny_experiment, axis, str(outdir), runner=runner)
    return outdir, rows


@pytest.fixture(scope="session")
def single_machine():
    # one generator alone with one load bus; used for islanded-response checks
    b = np.zeros((2, 2))
    b[0, 1] = b[1, 0] = 8.0
    return GridModel(bus_count=2,
                     generator_buses=(1,),
                     inertia_s=(4.0,),
                     rating_mva=(1000.0,),
                     damping_pu=(1.0,),
                     droop_gain=(20.0,),
                     governor_time_constant_s=(0.5,),
                     line_susceptance_pu=b)
