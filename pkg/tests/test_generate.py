from __future__ import annotations

import hashlib

import pytest

from ntacomp.corpus import FIXTURES
from ntacomp.corpus.generate import NetworkConfig, random_network, random_network_text
from ntacomp.model.validate import validate_axioms

GOLDEN = NetworkConfig(seed=1, max_automata=2, max_locations=2, max_channels=2, max_shared_vars=2, clock_ceiling=2)


def test_golden_fixture():
    text = random_network_text(GOLDEN)
    fixture = (FIXTURES / "random_seed1.tanet").read_text(encoding="utf-8")
    assert text == fixture
    digest, name = (FIXTURES / "SHA256SUMS").read_text().split()
    assert name == "random_seed1.tanet"
    assert hashlib.sha256(fixture.encode()).hexdigest() == digest


def test_deterministic():
    cfg = NetworkConfig(seed=77)
    assert random_network_text(cfg) == random_network_text(cfg)


@pytest.mark.parametrize("seed", range(100))
def test_generated_networks_validate_and_respect_bounds(seed):
    cfg = NetworkConfig(seed=seed)
    net = random_network(cfg)
    assert validate_axioms(net) == []
    assert 1 <= len(net.automata) <= cfg.max_automata
    assert 1 <= len(net.channels) <= cfg.max_channels
    assert len(net.globals) <= cfg.max_shared_vars
    for A in net.automata:
        assert len(A.locations) <= cfg.max_locations
        # clocks are always local
        assert all(v.kind != "clock" for v in A.external)
        for c in A.clocks:
            assert c.hi <= cfg.clock_ceiling
