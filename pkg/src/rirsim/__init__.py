"""Relay-aided multi-user MIMO broadcast simulator.

Modules
-------
numerics  complex linear algebra and seeded CN(0,1) sampling
model     network configuration, antenna clusters, channels, CSIT classes
schemes   TDMA / BD-TDMA / RIA baselines and the three relay-assisted engines
metrics   degree of delay, degree of freedom and relay/user cost
harness   sweeps, CSV output and the command-line entry point
"""

from .model import ConfigError, DataSetSpec, NetworkConfig
from .schemes import Scheme, simulate

__version__ = "0.1.0"

__all__ = ["ConfigError", "DataSetSpec", "NetworkConfig", "Scheme", "simulate", "__version__"]
