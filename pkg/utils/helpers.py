"""
Helper utility functions
"""

import logging

import numpy as np

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity=0, quiet=False):
    """
    Configure root logging for command-line runs

    Args:
        verbosity: 0 → WARNING, 1 → INFO, 2+ → DEBUG
        quiet: Only report errors
    """
    if quiet:
        level = logging.ERROR
    elif verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def make_rng(seed):
    """PCG64-backed generator, the only RNG used by the toolkit"""
    return np.random.Generator(np.random.PCG64(seed))


def derive_seeds(seed, count):
    """
    Split one seed into `count` independent child seeds

    Children come from SeedSequence.spawn, so the i-th child only depends on
    (seed, i) and not on how many siblings were requested.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def format_percent(value, decimals=2):
    """Format a fraction in [0, 1] as a percentage string"""
    return f"{value * 100:.{decimals}f}%"
