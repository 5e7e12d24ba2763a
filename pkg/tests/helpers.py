import numpy as np


def rel(a, b, floor=0.0):
    """Worst ``|a - b| / max(|b|, floor)`` over arrays."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))
