"""prenexkit - prenex normal forms with semi-classical certificates."""

__version__ = "0.1.0"
