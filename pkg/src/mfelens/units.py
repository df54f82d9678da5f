"""Natural unit system used throughout the package.

Everything is expressed in units of the atomic transition frequency:
hbar = c = epsilon_0 = 1, the slab thickness b = 1, and omega_a = 1.
Times are then measured in 1/omega_a and lengths in c/omega_a, so the
transition wavelength is lambda_a = 2*pi exactly.
"""

import math

HBAR = 1.0
C = 1.0
EPSILON0 = 1.0
SLAB_THICKNESS = 1.0
OMEGA_A = 1.0
LAMBDA_A = 2.0 * math.pi / OMEGA_A
