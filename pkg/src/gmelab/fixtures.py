"""Reference numerical data.

``RHO4_CSS_TABLE`` is a five-digit approximation (entries times 1e5) of the
closest fully separable state to rho4 found by a long independent Gilbert
run. It is not exactly normalized (trace 0.99998), so it is kept as a raw
matrix rather than a :class:`DensityMatrix`.
"""

from __future__ import annotations

import numpy as np

RHO4_CSS_TABLE = (
    ( 26475,      6,     27,   2662,     -6,      4,   2669,      0,    -38,   2663,      0,    -11,   2676,     -2,      0,   3079),
    (     6,   3552,      4,     -8,   1843,    -14,     -7,   2320,     23,     -3,      6,     -2,    -14,   2311,     -3,      4),
    (    27,      4,   3547,     -6,      1,      3,     -3,     -3,   1835,     -2,      5,   2312,      6,      0,   2320,      0),
    (  2662,     -8,     -6,   3136,      0,      9,   1550,    -16,    -11,   1536,     -5,     -6,   3027,      5,     -9,   2659),
    (    -6,   1843,      1,      0,   3574,      0,     -5,   2324,      0,    -10,    -11,      6,      8,   2306,     -4,     -7),
    (     4,    -14,      3,      9,      0,   3114,     -6,     -3,      7,     -4,    -12,    -17,      4,      3,     -2,      4),
    (  2669,     -7,     -3,   1550,     -5,     -6,   3141,      0,      3,   3028,     -5,    -11,   1532,      1,     11,   2640),
    (     0,   2320,     -3,    -16,   2324,     -3,      0,   3526,      0,      2,     -5,    -11,     -9,   1821,    -12,    -62),
    (   -38,     23,   1835,    -11,      0,      7,      3,      0,   3559,      2,     -2,   2308,      0,     -8,   2301,      9),
    (  2663,     -3,     -2,   1536,    -10,     -4,   3028,      2,      2,   3134,     -4,      0,   1522,     -7,      5,   2650),
    (     0,      6,      5,     -5,    -11,    -12,     -5,     -5,     -2,     -4,   3099,      2,     -3,    -11,      1,    -11),
    (   -11,     -2,   2312,     -6,      6,    -17,    -11,    -11,   2308,      0,      2,   3542,      7,     12,   1830,     -4),
    (  2676,    -14,      6,   3027,      8,      4,   1532,     -9,      0,   1522,     -3,      7,   3140,     13,      6,   2652),
    (    -2,   2311,      0,      5,   2306,      3,      1,   1821,     -8,     -7,    -11,     12,     13,   3538,    -13,    -36),
    (     0,     -3,   2320,     -9,     -4,     -2,     11,    -12,   2301,      5,      1,   1830,      6,    -13,   3525,     -8),
    (  3079,      4,      0,   2659,     -7,      4,   2640,    -62,      9,   2650,    -11,     -4,   2652,    -36,     -8,  26396),
)


def rho4_css_reference() -> np.ndarray:
    return np.array(RHO4_CSS_TABLE, dtype=float) * 1e-5
