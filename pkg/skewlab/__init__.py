"""skewlab: numerical laboratory for SDEs driven by fractional Brownian motion with distributional drift."""

__version__ = "0.1.0"
