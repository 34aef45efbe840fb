import os

import numpy as np

from decode_energy.models import AccessClass, EventVector, MeasurementRecord
from decode_energy.services.synthetic import balanced_four_pe_spec

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES_DIR, name)


def make_record(record_id, energy=1.0, counts=(100, 10, 2, 30, 3, 1, 20, 2, 1), decode_time=0.5,
                codec="HEVC", decoder="ffmpeg"):
    return MeasurementRecord(
        id=record_id,
        codec=codec,
        decoder=decoder,
        energy=energy,
        decode_time=decode_time,
        events=EventVector(tuple(counts)),
    )


def balanced_spec(n_records=500, noise_sigma=0.05, seed=11, coefficients=None, codec="SYN", decoder="synthetic"):
    """The balanced4 preset with noisy-test defaults."""
    return balanced_four_pe_spec(
        n_records=n_records,
        noise_sigma=noise_sigma,
        seed=seed,
        codec=codec,
        decoder=decoder,
        coefficients=coefficients,
    )


def random_event_vector(rng):
    """Event vector with random magnitudes that respects the cache hierarchy."""
    counts = []
    for _ in AccessClass:
        reference = int(rng.integers(1, 10 ** 9))
        l1_miss = int(rng.integers(0, reference + 1))
        ll_miss = int(rng.integers(0, l1_miss + 1))
        counts.extend((reference, l1_miss, ll_miss))
    return EventVector(tuple(counts))


def relative_difference(actual, expected):
    return abs(actual - expected) / abs(expected)


def gaussian_elimination_solve(matrix, target):
    """Normal equations solved with partial-pivoting Gaussian elimination (oracle)."""
    a = np.asarray(matrix, dtype=float)
    scale = np.max(np.abs(a), axis=0)
    scale[scale == 0] = 1.0
    a = a / scale
    gram = a.T @ a
    rhs = a.T @ np.asarray(target, dtype=float)
    n = gram.shape[0]
    augmented = np.column_stack([gram, rhs])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(augmented[col:, col])))
        augmented[[col, pivot]] = augmented[[pivot, col]]
        for row in range(col + 1, n):
            factor = augmented[row, col] / augmented[col, col]
            augmented[row, col:] -= factor * augmented[col, col:]
    solution = np.zeros(n)
    for row in range(n - 1, -1, -1):
        solution[row] = (augmented[row, -1] - augmented[row, row + 1:n] @ solution[row + 1:]) / augmented[row, row]
    return solution / scale
