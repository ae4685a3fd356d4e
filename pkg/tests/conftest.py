import csv

import numpy as np
import pytest

from netsentry.detectors import MlpConfig
from netsentry.synthetic import make_gaussian_flows
from netsentry.training import DetectorConfig, TrainResult, train_ensemble, tune_bundle_threshold


SMALL_DETECTORS = DetectorConfig(
    rf_trees=15,
    gbt_trees=15,
    iso_trees=30,
    iso_subsample=128,
    mlp=MlpConfig(hidden_layers=(32, 16), learning_rate=0.05, max_epochs=30),
)


@pytest.fixture(scope="session")
def gaussian_data():
    return make_gaussian_flows(3000, seed=11)


@pytest.fixture(scope="session")
def small_result(gaussian_data) -> TrainResult:
    """A small but fully functional trained ensemble shared across tests."""
    return train_ensemble(gaussian_data, detector_cfg=SMALL_DETECTORS, seed=11)


@pytest.fixture(scope="session")
def tuned_bundle(small_result):
    bundle, _, _ = tune_bundle_threshold(small_result.bundle, small_result.test, seed=11)
    return bundle


def write_flow_csv(path, dataset, label_header="Label"):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [label_header])
        for i in range(len(dataset)):
            writer.writerow(
                [repr(float(v)) for v in dataset.features[i]] + [dataset.categories[i]]
            )


@pytest.fixture
def flow_csv(tmp_path, gaussian_data):
    path = tmp_path / "flows.csv"
    write_flow_csv(path, gaussian_data)
    return path


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)
