import numpy as np
import pytest

from activeids.dataset import Schema, RecordSet, SynthConfig, encode, synth_generate


@pytest.fixture(scope="session")
def synth_rs():
    """Desk-scale fixture: 40 hosts, 4 planted attackers, 4,000 records."""
    return synth_generate(SynthConfig(), seed=7)


@pytest.fixture(scope="session")
def synth_matrix(synth_rs):
    return encode(synth_rs)


@pytest.fixture(scope="session")
def blob_points():
    """3 tight Gaussian blobs (sigma=0.1) with centers 10 apart."""
    rng = np.random.default_rng(11)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    points = np.vstack([c + 0.1 * rng.standard_normal((40, 2)) for c in centers])
    membership = np.repeat(np.arange(3), 40)
    return points, membership


def tiny_recordset():
    """3 records, 1 numeric + 1 categorical feature."""
    schema = Schema((
        ("srcip", "srcip"),
        ("bytes", "numeric"),
        ("proto", "categorical"),
        ("label", "label"),
    ))
    return RecordSet(
        schema,
        srcips=["10.0.0.1", "10.0.0.2", "10.0.0.1"],
        labels=[0, 1, 0],
        feature_data={
            "bytes": np.array([100.0, 250.0, 175.0]),
            "proto": np.array(["tcp", "udp", "tcp"], dtype=object),
        },
    )


@pytest.fixture
def tiny_rs():
    return tiny_recordset()
