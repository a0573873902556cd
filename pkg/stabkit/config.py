"""
Settings block for stabkit.

Exhaustive limits are exponents: 26 means at most 2^26 stabilizer elements.
STABKIT_MAX_ENUM overrides the stabilizer/normalizer limit and is read on
every call.
"""

from __future__ import annotations

import os
from pathlib import Path

from stabkit.errors import ConfigError

# ==========================================
# Settings
# ==========================================
MAX_STABILIZER_BITS = 26      # 2^(n-k) stabilizer elements
MAX_LOGICAL_QUBITS = 10       # 4^k logical classes
MAX_CLASSICAL_DIMENSION = 24  # 2^k classical codewords
MAX_COSET_BITS = 5            # 2^(n-k) - 1 reduction instances

ENV_MAX_ENUM = "STABKIT_MAX_ENUM"

PROJECT_ROOT = Path(__file__).resolve().parents[1]
CODES_DIR = PROJECT_ROOT / "codes"
FIXTURE_LIST = PROJECT_ROOT / "codes.txt"
OUTPUT_DIR = PROJECT_ROOT / "output"
REPORT_FILE = OUTPUT_DIR / "we_report.json"


def max_enum_bits() -> int:
    """Enumeration exponent for stabilizer groups and normalizers."""

    raw = os.environ.get(ENV_MAX_ENUM)
    if raw is None or raw.strip() == "":
        return MAX_STABILIZER_BITS

    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_MAX_ENUM} must be an integer, got {raw!r}") from None

    if value < 0:
        raise ConfigError(f"{ENV_MAX_ENUM} must be non-negative, got {value}")

    return value


def max_logical_qubits() -> int:
    return MAX_LOGICAL_QUBITS


def max_classical_dimension() -> int:
    return MAX_CLASSICAL_DIMENSION


def max_coset_bits() -> int:
    return MAX_COSET_BITS
