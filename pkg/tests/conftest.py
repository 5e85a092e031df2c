import pytest


@pytest.fixture(autouse=True)
def isolated_output_root(tmp_path, monkeypatch):
    """Keep the station activity log and run directories out of the repo."""
    monkeypatch.setenv("SKEWLAB_OUTPUT_ROOT", str(tmp_path / "results"))
    return tmp_path / "results"
