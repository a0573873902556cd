import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from stabkit import config
from stabkit.batch import run_fixtures

# ==========================================
# ⚙️ Settings
# ==========================================
FIXTURE_LIST = config.FIXTURE_LIST
OUTPUT_FILE = config.REPORT_FILE
VERIFY = True


def main():
    results = run_fixtures(FIXTURE_LIST, OUTPUT_FILE, verify=VERIFY)
    if not all(r["match"] for r in results):
        sys.exit(3)


if __name__ == "__main__":
    main()
