"""Half-line NLS with a Robin boundary condition: scattering, solitons, asymptotics and a PDE oracle."""

__version__ = "0.1.0"
