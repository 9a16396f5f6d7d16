"""D-band MIMO geometry-based stochastic channel simulator."""

__version__ = '1.0.0'
