"""Quench dynamics after flipping the first qubit."""
from _common import run_preset

if __name__ == "__main__":
    run_preset("fig4", __doc__)
