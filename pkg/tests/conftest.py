"""Shared fixtures: trained models are expensive, so they are built once per
session and shared by the attribution, grid, and acceptance tests."""

import numpy as np
import pytest

from lpattr.data import generate_dataset
from lpattr.encodings import ENCODING_KINDS, make_encoding
from lpattr.fixtures import lp_5d, lp_box
from lpattr.nn import ModelConfig, train_model

BOX_SEED = 501
BOX_COUNT = 20_000


@pytest.fixture(scope="session")
def box_lp():
    return lp_box()


@pytest.fixture(scope="session")
def box_encodings(box_lp):
    exclusions = {"vertex-distance": np.zeros((1, box_lp.n))}
    return {
        kind: make_encoding(box_lp, kind, excluded_vertices=exclusions.get(kind))
        for kind in ENCODING_KINDS
    }


@pytest.fixture(scope="session")
def box_datasets(box_lp, box_encodings):
    return {
        kind: generate_dataset(box_lp, enc, BOX_COUNT, seed=BOX_SEED)
        for kind, enc in box_encodings.items()
    }


@pytest.fixture(scope="session")
def box_models(box_datasets):
    return {
        kind: train_model(ds, ModelConfig(seed=BOX_SEED))
        for kind, ds in box_datasets.items()
    }


@pytest.fixture(scope="session")
def feasibility_100k_model(box_lp, box_encodings):
    ds = generate_dataset(box_lp, box_encodings["feasibility"], 100_000, seed=808)
    return train_model(ds, ModelConfig(seed=808)), ds


@pytest.fixture(scope="session")
def fivedim_report():
    from lpattr.experiments import experiment_5dim

    return experiment_5dim(lp_5d(), seed=131)


@pytest.fixture(scope="session")
def monotone_model():
    from lpattr.properties import build_monotone_harness

    return build_monotone_harness(n=2, seed=17)
