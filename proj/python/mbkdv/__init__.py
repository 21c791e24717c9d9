"""Python access to the mbkdv core."""

from ._mbkdv import (  # noqa: F401
    MbkdvError,
    __version__,
    critical_index,
    estimate_indices,
    growth_exponent,
    resonance_H,
    run,
)
