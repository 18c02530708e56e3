"""annulus-lab - abstract angles and monotone twist maps of the annulus."""

__version__ = "0.1.0"
