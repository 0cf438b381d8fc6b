"""AAH chain spectrum against phase and modulation frequency."""
from _common import run_preset

if __name__ == "__main__":
    run_preset("aah", __doc__)
