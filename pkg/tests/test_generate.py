import random

import pytest

from helpers import nopath_net
from ocalign.datasets import loan_net, packaging_net
from ocalign.generate import GenerationError, NoiseSpec, generate_log, random_run
from ocalign.instances import random_instance, random_instances
from ocalign.log import extract_process_executions, validate_execution_dag
from ocalign.petri import replay


def test_random_run_is_accepted():
    an = packaging_net()
    objects = {"p": "package", "i1": "item", "i2": "item"}
    dj, seq = random_run(an, objects, random.Random(1))
    assert replay(dj, seq).accepted


def test_random_run_reports_impossible_nets():
    with pytest.raises(GenerationError):
        random_run(nopath_net(), {"x": "a"}, random.Random(0))


def test_generate_log_shapes():
    log = generate_log(loan_net(), 6, {"application": (1, 1), "offer": (1, 2)}, seed=4)
    pxs = extract_process_executions(log)
    assert len(pxs) == 6
    for px in pxs:
        assert validate_execution_dag(px) == []
        assert sum(1 for o in px.objects if px.object_types[o] == "application") == 1


def test_generate_is_seeded():
    a = generate_log(packaging_net(), 3, {"package": (1, 1), "item": (1, 3)}, NoiseSpec(0.2, 0.2, 0.2, seed=1), seed=9)
    b = generate_log(packaging_net(), 3, {"package": (1, 1), "item": (1, 3)}, NoiseSpec(0.2, 0.2, 0.2, seed=1), seed=9)
    assert a == b


def test_noise_changes_log():
    clean = generate_log(packaging_net(), 5, {"package": (1, 1), "item": (2, 2)}, seed=2)
    noisy = generate_log(packaging_net(), 5, {"package": (1, 1), "item": (2, 2)}, NoiseSpec(0.5, 0.5, 0.5, seed=2), seed=2)
    assert clean != noisy


def test_noise_spec_bounds():
    with pytest.raises(ValueError):
        NoiseSpec(remove_prob=1.5)
    assert NoiseSpec().is_zero


def test_random_instances_respect_bounds():
    for inst in random_instances(60):
        assert len(inst.execution.events) <= 6
        assert len(inst.execution.objects) <= 3
        assert len(inst.net.net.transitions) <= 8
    assert random_instance(5) == random_instance(5)
