import math

import numpy as np
import pytest

from decode_energy.config import BaseConfig
from decode_energy.errors import GeneratorSpecError
from decode_energy.models import EVENT_KINDS, FOUR_PE, AccessClass, CacheLevel, EventKind
from decode_energy.services.energy_model import fit_least_squares, predict
from decode_energy.services.synthetic import (
    FOUR_PE_COEFFICIENTS,
    GENERATOR_PRESETS,
    GeneratorSpec,
    balanced_four_pe_spec,
    four_pe_spec,
    generate,
)
from tests.helpers import relative_difference


def test_noiseless_energies_equal_the_truth_model():
    spec = four_pe_spec(n_records=100, seed=5)
    truth = spec.truth_model()
    for record in generate(spec):
        assert record.energy == predict(truth, record.events)


def test_same_spec_gives_identical_datasets():
    spec = four_pe_spec(n_records=50, noise_sigma=0.05, seed=9)
    assert generate(spec) == generate(spec)


def test_different_seeds_differ():
    assert generate(four_pe_spec(n_records=5, seed=1)) != generate(four_pe_spec(n_records=5, seed=2))


def test_published_coefficients_give_plausible_energies():
    dataset = generate(four_pe_spec(n_records=500, seed=0))
    energies = dataset.energies()
    assert energies.min() >= 0.5
    assert energies.max() <= 40.0


def test_instruction_counts_cover_the_requested_band():
    dataset = generate(four_pe_spec(n_records=500, seed=0))
    counts = np.array([record.events[EventKind.I_R] for record in dataset], dtype=float)
    assert counts.min() >= 10 ** 9.5 - 1
    assert counts.max() <= 10 ** 10.7 + 1


def test_counts_respect_hierarchy_for_random_specs():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        low = float(rng.uniform(0, 10))
        spec = GeneratorSpec(
            n_records=50,
            true_coefficients={EventKind.I_R: 1e-9},
            count_ranges={EventKind.I_R: (low, low + float(rng.uniform(0, 2)))},
            seed=int(rng.integers(0, 2 ** 63)),
            l1_miss_fraction={ac: float(rng.uniform(0, 1)) for ac in AccessClass},
            ll_miss_fraction={ac: float(rng.uniform(0, 1)) for ac in AccessClass},
        )
        # EventVector validates the hierarchy on construction
        dataset = generate(spec)
        assert len(dataset) == 50


def test_pipeline_closure_recovers_support():
    coefficients = {EventKind.I_R: 0.5e-9, EventKind.R_L1: 2e-8, EventKind.W_LL: 1e-7}
    spec = GeneratorSpec(n_records=200, true_coefficients=coefficients, seed=4)
    dataset = generate(spec)
    model = fit_least_squares(dataset, spec.support)
    for kind, expected in coefficients.items():
        assert relative_difference(model[kind], expected) <= 1e-9


def test_support_of_published_coefficients():
    assert four_pe_spec().support == FOUR_PE


def test_truth_model_is_zero_outside_support():
    truth = four_pe_spec().truth_model()
    assert truth[EventKind.R_R] == 0.0
    assert truth[EventKind.I_LL] == FOUR_PE_COEFFICIENTS[EventKind.I_LL]


def test_decode_time_follows_nominal_power():
    spec = four_pe_spec(n_records=200, seed=3)
    for record in generate(spec):
        ratio = record.energy / record.decode_time
        # 2 W nominal, 1% log-normal noise
        assert abs(math.log(ratio / BaseConfig.NOMINAL_POWER_W)) < 0.06


def test_time_resolution_quantises_decode_times():
    base = four_pe_spec(n_records=20, seed=3)
    spec = GeneratorSpec(
        n_records=base.n_records,
        true_coefficients=base.true_coefficients,
        seed=base.seed,
        time_resolution=0.5,
    )
    for record in generate(spec):
        steps = record.decode_time / 0.5
        assert steps == pytest.approx(round(steps))


def test_ids_carry_group_label():
    dataset = generate(four_pe_spec(n_records=3, codec="VP9", decoder="lib vpx"))
    assert dataset.ids == ("VP9-lib_vpx-00000", "VP9-lib_vpx-00001", "VP9-lib_vpx-00002")
    assert dataset[0].group == ("VP9", "lib vpx")


def test_generated_records_use_only_valid_counts():
    dataset = generate(four_pe_spec(n_records=50, seed=8))
    for record in dataset:
        for access_class in AccessClass:
            reference = record.events.count(access_class, CacheLevel.REFERENCE)
            assert reference > 0


@pytest.mark.parametrize("kwargs", [
    {"n_records": 0, "true_coefficients": {}},
    {"n_records": 5, "true_coefficients": {EventKind.I_R: -1.0}},
    {"n_records": 5, "true_coefficients": {}, "count_ranges": {EventKind.I_LL: (1, 2)}},
    {"n_records": 5, "true_coefficients": {}, "count_ranges": {EventKind.I_R: (3, 2)}},
    {"n_records": 5, "true_coefficients": {}, "noise_sigma": -0.1},
    {"n_records": 5, "true_coefficients": {}, "l1_miss_fraction": {AccessClass.INSTRUCTION: 1.5}},
    {"n_records": 5, "true_coefficients": {}, "time_resolution": 0.0},
])
def test_invalid_specs(kwargs):
    with pytest.raises(GeneratorSpecError):
        GeneratorSpec(**kwargs)


def test_presets():
    assert set(GENERATOR_PRESETS) == {"paper4", "balanced4"}
    for preset in GENERATOR_PRESETS.values():
        spec = preset(n_records=10)
        assert [kind for kind in EVENT_KINDS if spec.true_coefficients[kind]] == list(FOUR_PE)


def test_balanced_preset_gives_every_term_a_real_share():
    spec = balanced_four_pe_spec(n_records=500, seed=0)
    dataset = generate(spec)
    total = dataset.energies().sum()
    for kind in FOUR_PE:
        term = sum(spec.true_coefficients[kind] * record.events[kind] for record in dataset)
        assert term / total >= 0.05
