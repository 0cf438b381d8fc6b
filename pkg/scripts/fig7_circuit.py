"""Gap-tunable flux qubit levels and coupling elements."""
from _common import run_preset

if __name__ == "__main__":
    run_preset("fig7", __doc__)
