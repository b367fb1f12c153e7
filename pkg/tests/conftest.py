import pytest

from refcast.sampledata import make_sample_dataset


@pytest.fixture(scope="session")
def bundled_dataset():
    """The default-seed synthetic dataset, built once per session."""
    return make_sample_dataset()


@pytest.fixture(scope="session")
def bundled_csv_path(bundled_dataset, tmp_path_factory):
    from refcast.records import serialize_dataset

    path = tmp_path_factory.mktemp("data") / "sample_dataset.csv"
    path.write_text(serialize_dataset(bundled_dataset), encoding="utf-8")
    return path
