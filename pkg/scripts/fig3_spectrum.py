"""SSH spectrum against a and edge/bulk wave functions."""
from _common import run_preset

if __name__ == "__main__":
    run_preset("fig3", __doc__)
