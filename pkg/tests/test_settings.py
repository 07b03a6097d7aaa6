from __future__ import annotations

from unittest.mock import MagicMock, patch

import pytest

from exotic.exceptions import DecoupleNotFoundError
from exotic.settings import ENV_PREFIX, env, env_overrides, read_env


def test_env_key_for_field() -> None:
    key = env.for_field("max_depth")
    assert isinstance(key, env)
    assert key == f"{ENV_PREFIX}MAX_DEPTH"


class TestReadEnv:
    def test_reads_through_decouple(self) -> None:
        decouple = MagicMock()
        decouple.config.return_value = "7"
        with patch.dict("sys.modules", {"decouple": decouple}):
            assert read_env(env("EXOTIC_WORKERS")) == "7"
        decouple.config.assert_called_once_with("EXOTIC_WORKERS", default=None)

    def test_missing_decouple(self) -> None:
        with (
            patch.dict("sys.modules", {"decouple": None}),
            pytest.raises(DecoupleNotFoundError, match="pip install python-decouple"),
        ):
            read_env("EXOTIC_WORKERS")


def test_env_overrides_keeps_set_values() -> None:
    values = {"EXOTIC_WORKERS": "4"}
    with patch("exotic.settings.read_env", side_effect=lambda key: values.get(str(key))):
        assert env_overrides(["max_depth", "workers"]) == {"workers": "4"}
