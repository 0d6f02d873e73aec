import socket

import pytest

from admexplain.core import ExplanationType, Mode, ModeWeightTable
from admexplain.errors import BadConfig, PortInUse
from admexplain.service import ServiceConfig, serve


def test_occupied_port_raises_port_in_use():
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    try:
        with pytest.raises(PortInUse):
            serve(ServiceConfig(port=port))
    finally:
        blocker.close()


def test_config_file_parsing(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        '{"port": 9123, "data_dir": "%s", "collections": '
        '[{"name": "x", "dimension": 3, "metric": "Cosine"}], '
        '"decision_log_dimension": 7, "credit_threshold": 0.6}' % tmp_path,
        encoding="utf-8",
    )
    config = ServiceConfig.from_file(path)
    assert config.port == 9123
    assert config.decision_log_dimension == 7
    assert config.credit_threshold == 0.6
    assert config.collections[0]["name"] == "x"


def test_bad_config_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(BadConfig):
        ServiceConfig.from_file(path)
    with pytest.raises(BadConfig):
        ServiceConfig.from_file(tmp_path / "missing.json")


def test_to_marks_rejects_uncodable_weights():
    weights = {row: {mode: 0.0 for mode in Mode} for row in ExplanationType}
    weights[ExplanationType.CAUSAL_HISTORY][Mode.COVARIATION] = 3.0
    with pytest.raises(ValueError, match="no mark encoding"):
        ModeWeightTable(weights).to_marks()
