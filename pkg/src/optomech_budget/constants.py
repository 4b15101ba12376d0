"""Physical constants and the built-in silica material table.

All constants are the exact SI-2019 defining values, so no CODATA
revision can change them. The silica table is versioned: bump
``SILICA_TABLE_VERSION`` whenever a number changes so that stored run
reports can be traced to the constants that produced them.
"""

import math

# SI-2019 exact defining constants
PLANCK_H = 6.62607015e-34  # J s
HBAR = PLANCK_H / (2.0 * math.pi)  # J s
K_B = 1.380649e-23  # J / K
C_LIGHT = 299792458.0  # m / s

# Shot-noise limited detection floor of the homodyne laser source.
LOW_FREQ_FLOOR_HZ = 500e3

SILICA_TABLE_VERSION = "2024.1"

# Ambient fused silica (Suprasil / Corning 7980 class), valid 250-350 K.
#   n      Malitson, JOSA 55, 1205 (1965); 1.4525 at 850 nm, rounded
#   dn_dT  Leviton & Frey, Proc. SPIE 6273 (2006); room temperature, visible/NIR
#   rho    manufacturer datasheets (Heraeus, Corning): 2.20 g/cm^3
#   C      specific heat, manufacturer datasheets; lower end of the 670-740 J/(kg K) spread
#   D      thermal diffusivity k/(rho C) with k = 1.28 W/(m K)
SILICA_AMBIENT = {
    "n": 1.45,
    "dn_dT": 1.2e-5,
    "rho": 2200.0,
    "C": 670.0,
    "D": 8.7e-7,
}
SILICA_AMBIENT_RANGE_K = (250.0, 350.0)
