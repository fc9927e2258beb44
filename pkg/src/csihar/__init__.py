"""Human activity classification over CSI subcarrier traces."""

__version__ = "0.1.0"
