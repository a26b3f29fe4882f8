import re
from pathlib import Path

import pytest

from tamecycles.__version__ import VERSION, __version__
from tamecycles.cli import main


def test_version_matches_the_manifest():
    assert __version__ == ".".join(map(str, VERSION))
    manifest = (Path(__file__).parent.parent / "pyproject.toml").read_text(encoding="utf8")
    assert re.search(r'^version = "([^"]+)"', manifest, re.M).group(1) == __version__


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.strip() == f"tamecycles {__version__}"
