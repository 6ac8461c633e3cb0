"""Remote entanglement of three atoms in fiber-coupled cavities.

Modules
-------
model         cavity/fiber parameters -> Ising-ring couplings
dynamics      three-spin Hamiltonians and time evolution
entanglement  concurrence, tangles, residual three-atom entanglement
protocol      laser turn-off + measurement Bell-state preparation
oracle        brute-force 8-dim reference propagation
cli           the ``entangler`` command
"""
__version__ = "0.1.0"
