"""Trainability diagnostics for parameterized quantum circuits.

Subpackages:

- ``pauli``        bit-mask Pauli strings and commutation algebra
- ``statevector``  dense statevector simulator and reduced-state deviations
- ``rng``          seed-stream derivation, Haar and Clifford sampling
- ``circuits``     gate/circuit types, experiment builders, light cones
- ``diagnostics``  parameter-shift statistics and concentration-bound checks
- ``weingarten``   symmetric-group moment calculus and exact closed forms
- ``cli``          batch experiment runner
"""

__version__ = "0.1.0"
