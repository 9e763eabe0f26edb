"""
Command-line interface for the ample-complex toolkit.
"""

from .main import cli, main
from .oracles import OracleSpec

__all__ = ["OracleSpec", "cli", "main"]
