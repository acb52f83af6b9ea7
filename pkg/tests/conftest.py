from __future__ import annotations

import os
import typing as t

import pytest
from hypothesis import HealthCheck, settings

from ntacomp.corpus import plan_path
from ntacomp.model.ast import Network

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from helpers import corpus_model


@pytest.fixture
def corpus() -> t.Callable[..., Network]:
    return corpus_model


@pytest.fixture
def plans():
    return plan_path
