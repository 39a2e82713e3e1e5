"""Figure rendering for stored circuit-trainability runs.

Modules:

- ``data``     readers for shifted-pair dumps and sweep summaries
- ``figures``  scatter grids and decay curves with byte-stable output
- ``cli``      the ``plots`` command
"""

__version__ = "0.1.0"
