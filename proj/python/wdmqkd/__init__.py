"""Key rates for wavelength-multiplexed entanglement-based BB84 QKD.

Thin wrapper around the C++ core; see the package README for the model and
the CLI entry points.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
