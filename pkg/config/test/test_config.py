import pytest

from config.config import get_config, load_config_file, merge_config, resolve_threads


def test_config_file_dotted_keys_and_comments(tmp_path):
    path = tmp_path / "blindsr.conf"
    path.write_text(
        "# 고전 솔버\n"
        "classical.lambda = 1e-3   # 더 강한 정칙화\n"
        "engine.estimator_first=true\n"
        "runtime.threads = none\n"
        "bench.kernels = gaussian8\n"
    )
    overrides = load_config_file(path)
    assert overrides["classical"]["lambda"] == pytest.approx(1e-3)
    assert overrides["engine"]["estimator_first"] is True
    assert overrides["runtime"]["threads"] is None
    assert overrides["bench"]["kernels"] == "gaussian8"


def test_config_file_rejects_lines_without_equals(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("classical.lambda 1e-3\n")
    with pytest.raises(ValueError, match="bad.conf:1"):
        load_config_file(path)


def test_flags_override_file_override_defaults():
    defaults = get_config()
    merged = merge_config(
        defaults,
        {"classical": {"lambda": 1e-3, "ridge": 1e-5}},
        {"classical": {"lambda": 5e-2, "ridge": None}},
    )
    assert merged["classical"]["lambda"] == 5e-2
    assert merged["classical"]["ridge"] == 1e-5
    assert merged["classical"]["cg_iters"] == defaults["classical"]["cg_iters"]
    assert defaults["classical"]["lambda"] == 1e-4


def test_thread_resolution_order(monkeypatch):
    monkeypatch.setenv("BLINDSR_THREADS", "3")
    assert resolve_threads(2) == 2
    assert resolve_threads(None) == 3
    monkeypatch.delenv("BLINDSR_THREADS")
    assert resolve_threads(None) >= 1
