import pytest

from klball.config import K_MAX_LIMIT, Settings, default_config_path, get_settings, load_settings, set_settings
from klball.errors import InputError


def test_defaults(tmp_path):
    settings = load_settings(environ={})
    assert settings.k_max == 24
    assert 1 <= settings.workers <= 8
    assert settings.digits == 12
    assert default_config_path() == tmp_path / ".config" / "klball" / "config.yaml"


def test_yaml_then_environment(tmp_path):
    path = tmp_path / "klball.yaml"
    path.write_text("k_max: 12\nworkers: 3\n", encoding="utf-8")
    settings = load_settings(path, environ={"KLBALL_WORKERS": "5", "KLBALL_DIGITS": "8"})
    assert (settings.k_max, settings.workers, settings.digits) == (12, 5, 8)


def test_default_file_is_read_when_present(tmp_path):
    path = default_config_path()
    path.parent.mkdir(parents=True)
    path.write_text("digits: 6\n", encoding="utf-8")
    assert load_settings(environ={}).digits == 6


@pytest.mark.parametrize(
    "text", ["k_max: 27\n", "colour: blue\n", "workers: many\n", "- 1\n- 2\n", "digits: 0\n"]
)
def test_invalid_yaml_settings(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(InputError):
        load_settings(path, environ={})


def test_missing_explicit_file(tmp_path):
    with pytest.raises(InputError):
        load_settings(tmp_path / "nope.yaml")


def test_invalid_environment():
    with pytest.raises(InputError):
        load_settings(environ={"KLBALL_K_MAX": "lots"})


def test_override_ignores_none():
    settings = Settings(k_max=10, workers=2, digits=6)
    assert settings.override(k_max=None) is settings
    assert settings.override(k_max=20, workers=None).k_max == 20
    with pytest.raises(InputError):
        settings.override(workers=0)


def test_global_settings_are_lazy(monkeypatch):
    set_settings(None)
    monkeypatch.setenv("KLBALL_K_MAX", "7")
    assert get_settings().k_max == 7
    assert get_settings() is get_settings()


def test_k_max_limit_bounds_enumeration_memory():
    assert Settings(k_max=K_MAX_LIMIT).k_max == 26
    with pytest.raises(InputError):
        Settings(k_max=K_MAX_LIMIT + 1)
