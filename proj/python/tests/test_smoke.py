import os

import pytest

import natpatl

MODELS = os.path.join(os.path.dirname(__file__), "..", "..", "models")


@pytest.fixture(scope="module")
def coin():
    return natpatl.load_cgs(os.path.join(MODELS, "coin.cgs"))


def test_model_introspection(coin):
    assert coin.num_states == 3
    assert coin.agents == ["a"]
    assert coin.initial_state == "s0"


def test_check_with_witness(coin):
    r = natpatl.check(coin, "<<a>>[>=1/2, k=1] F heads")
    assert r["verdict"] == "true"
    w = r["witnesses"][0]
    assert w["state"] == "s0"
    assert w["probability"] == "1/2"
    assert w["profile"][0][0] == "a"


def test_check_false_and_iterative(coin):
    assert natpatl.check(coin, "<<a>>[>1/2, k=1] F heads")["verdict"] == "false"
    maze = natpatl.load_cgs(os.path.join(MODELS, "maze.cgs"))
    r = natpatl.check(maze, "<<C>>[>=1/2, k=1] F t0", solve="iterative")
    assert r["verdict"] == "unknown"


def test_estimate_until_reproducible(coin):
    s = natpatl.load_strategy(os.path.join(MODELS, "toss.nstrat"), coin)
    a = natpatl.estimate_until(coin, [s], "F heads", n=5000, seed=3)
    b = natpatl.estimate_until(coin, [s], "F heads", n=5000, seed=3)
    assert a == b
    assert abs(a["value"] - 0.5) < 0.05


def test_enumerate_and_encode(coin):
    strategies = natpatl.enumerate_strategies(coin, "a", 2)
    assert any("T -> toss" in s for s in strategies)
    enc = natpatl.encode(coin, "<<a>>[>=1/2, k=1] F heads")
    assert "(set-logic QF_NRA)" in enc["smt2"]
    assert enc["num_skeletons"] >= 1


def test_errors_surface_as_exceptions(coin):
    with pytest.raises(natpatl.NatPatlError):
        natpatl.check(coin, "<<nobody>>[>=1/2, k=1] F heads")
    with pytest.raises(natpatl.NatPatlError):
        natpatl.load_cgs(os.path.join(MODELS, "missing.cgs"))


def test_voting_pipeline():
    voting = natpatl.load_cgs(os.path.join(MODELS, "voting.cgs"))
    voter = natpatl.load_strategy(os.path.join(MODELS, "voter.nstrat"), voting)
    coercer = natpatl.load_strategy(os.path.join(MODELS, "coercer.nstrat"), voting)
    assert voter.setting == "r" and coercer.setting == "R"
    e = natpatl.estimate_until(voting, [voter, coercer], "F vot_v",
                               n=2000, seed=1)
    assert e["hits"] == e["samples"]
