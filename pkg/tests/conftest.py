"""Shared fixtures: simulated datasets, spec bundles and a synthetic applied CSV"""

import numpy as np
import pytest
from scipy.special import expit

from estimators.base import SpecBundle
from model.nuisance import Dataset
from simulation.dgp import DgpConfig, generate_dataset
from utils.core import derive_rng
from utils.data_generator import CovidShapedGenerator


def make_complete_dataset(n=400, seed=3):
    """Same generating model as the simulation study but nothing missing"""
    rng = derive_rng(seed, 42)
    X = rng.standard_normal((n, 3))
    A = (rng.random(n) < expit(-0.2 + X @ [0.9, 1.0, 0.8])).astype(float)
    Y = (rng.random(n) < expit(0.7 + X @ [0.5, 0.9, 0.7] + A)).astype(float)
    return Dataset.from_arrays(X, A, Y)


@pytest.fixture(scope='session')
def sim_data():
    return generate_dataset(DgpConfig(n=500, seed=11))


@pytest.fixture(scope='session')
def complete_data():
    return make_complete_dataset()


@pytest.fixture
def full_specs():
    return SpecBundle.full(3)


@pytest.fixture
def covid_csv(tmp_path):
    return CovidShapedGenerator(seed=5).generate_now(tmp_path / 'cohort.csv')


@pytest.fixture
def small_csv(tmp_path):
    path = tmp_path / 'small.csv'
    path.write_text("A,Y,x1,x2\n1,0,0.5,a\nNA,1,-1.25,b\n0,1,2.0,a\n")
    return path
