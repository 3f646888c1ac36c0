"""Random microstructures, FFT-based apparent conductivities and sampling statistics."""

from ._rvelab import *  # noqa: F401,F403
from ._rvelab import __version__  # noqa: F401
