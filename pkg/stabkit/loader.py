from __future__ import annotations

import json
from pathlib import Path

from stabkit import config
from stabkit.channel import PauliChannel, channel_from_json, parse_channel_spec
from stabkit.errors import FormatError
from stabkit.reduction import ClassicalCode
from stabkit.stabilizer import StabilizerCode, Syndrome, parse_code_text


def _read(path: str | Path) -> str:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    return path.read_text(encoding="utf-8")


def load_classical_code(path: str | Path) -> ClassicalCode:
    """
    Generator matrix file: one 0/1 row per line, '#' comments.
    """
    try:
        return ClassicalCode.from_text(_read(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def load_stabilizer_code(path: str | Path) -> StabilizerCode:
    try:
        return parse_code_text(_read(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def load_channel(spec: str, n: int) -> PauliChannel:
    """A shortcut such as "xz:p=1/8", inline JSON, or a path to a JSON file."""

    path = Path(spec)
    if spec.endswith(".json") or path.is_file():
        try:
            return channel_from_json(json.loads(_read(path)))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    return parse_channel_spec(spec, n)


def load_syndrome(text: str, code: StabilizerCode) -> Syndrome:
    text = text.strip()
    if len(text) != code.r or any(ch not in "01" for ch in text):
        raise FormatError(f"syndrome must be {code.r} characters of 0/1, got {text!r}")
    return Syndrome.from_string(text)


def load_fixture_list(path: str | Path = config.FIXTURE_LIST) -> list[Path]:
    """
    Fixture names, one per line, relative to the codes directory.
    """
    lines = _read(path).splitlines()
    names = [line.strip() for line in lines if line.strip() and not line.strip().startswith("#")]
    return [config.CODES_DIR / name for name in names]
