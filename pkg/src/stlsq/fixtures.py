"""Published worked examples: inputs and the values reported for them.

Indices in the support sequences are 1-based, as printed.
"""

import numpy as np

EXAMPLE1_A = np.array(
    [
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [-0.1, 0.9, 0.0, 0.0, 0.0],
        [-0.1, -0.1, 0.8, 0.0, 0.0],
        [-0.1, -0.1, -0.1, 0.7, 0.0],
        [-0.1, -0.1, -0.1, -0.1, 0.6],
    ]
)
EXAMPLE1_X = np.array([10.0, 0.95, 0.9, 0.85, 0.8])
EXAMPLE1_B = np.array([10.0, -0.145, -0.375, -0.59, -0.79])

# lambda in (0.95, 10]: one refinement
EXAMPLE1_ONESTEP = [
    np.array([10.0, 0.95, 0.9, 0.85, 0.8]),
    np.array([9.7981, 0.0, 0.0, 0.0, 0.0]),
]
EXAMPLE1_ONESTEP_SUPPORTS = [[1], [1]]

# lambda = 0.802: four refinements
EXAMPLE1_FULLPATH = [
    np.array([10.0, 0.95, 0.9, 0.85, 0.8]),
    np.array([9.9366, 0.8725, 0.8031, 0.7255, 0.0]),
    np.array([9.8869, 0.8117, 0.7271, 0.0, 0.0]),
    np.array([9.8417, 0.7566, 0.0, 0.0, 0.0]),
    np.array([9.7981, 0.0, 0.0, 0.0, 0.0]),
]
EXAMPLE1_FULLPATH_SUPPORTS = [[1, 2, 3, 4], [1, 2, 3], [1, 2], [1], [1]]

EXAMPLE2_A = np.array(
    [
        [4, 5, 1, 6, 8, 4, 6, 6, 2, 7],
        [6, 5, 7, 5, 3, 3, 2, 5, 9, 2],
        [1, 5, 1, 7, 4, 8, 1, 3, 9, 7],
        [10, 2, 9, 5, 5, 10, 0, 8, 1, 2],
        [9, 9, 3, 9, 6, 4, 3, 7, 1, 4],
        [10, 1, 7, 8, 7, 4, 10, 3, 3, 6],
        [2, 4, 4, 5, 6, 9, 1, 9, 1, 9],
        [2, 5, 1, 3, 6, 3, 10, 7, 2, 1],
        [1, 1, 1, 3, 10, 4, 4, 4, 5, 1],
        [6, 5, 1, 4, 2, 5, 1, 5, 1, 8],
    ],
    dtype=float,
)
EXAMPLE2_X = np.array([1.0, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0])
EXAMPLE2_ETA = np.array([0.23, 0.08, -0.01, -0.02, 0.04, -0.28, -0.32, 0.09, 0.30, 0.63])
EXAMPLE2_B = np.array([10.23, 18.08, 6.99, 20.98, 21.04, 17.72, 9.68, 8.09, 3.30, 12.63])

# printed to two decimals
EXAMPLE2_ITERATES = [
    np.array([0.88, 2.83, 2.04, -1.60, 0.84, 0.63, 0.13, -1.82, -0.42, 0.26]),
    np.array([1.06, 1.08, 0.96, -0.10, 0.04, 0, 0, -0.03, 0, 0]),
    np.array([1.04, 1.01, 0.94, 0, 0, 0, 0, 0, 0, 0]),
]
# each support listed by decreasing |x_j|
EXAMPLE2_ORDERED_SUPPORTS = [[2, 3, 8, 4, 1, 5], [2, 1, 3], [1, 2, 3]]

TABLE1 = {
    "example1_lambda8": (8.0, [320.0000, 65.2119]),
    "example1_lambda0.802": (0.802, [3.2160, 2.7727, 2.3688, 2.0490, 1.8551]),
    "example2_lambda0.7": (0.7, [4.9000, 2.9401, 1.4702]),
}

# identified models at noise level 0.1, keyed by equation then term
LORENZ_REPORTED = {
    "snr": 41.1508,
    "relative_error": 0.0278,
    "coefficients": [
        {"u1": -9.8122, "u2": 9.8163},
        {"u1": 27.1441, "u2": -0.8893, "u1*u3": -0.9733},
        {"u3": -2.6238, "u1*u2": 0.9841},
    ],
}
THOMAS_REPORTED = {
    "snr": 25.8469,
    "relative_error": 0.0023,
    "coefficients": [
        {"u1": -0.1805, "sin(u2)": 1.0014},
        {"u2": -0.1799, "sin(u3)": 1.0038},
        {"u3": -0.1803, "sin(u1)": 0.9992},
    ],
}

TRUE_COEFFICIENTS = {
    "lorenz": [
        {"u1": -10.0, "u2": 10.0},
        {"u1": 28.0, "u2": -1.0, "u1*u3": -1.0},
        {"u3": -8.0 / 3.0, "u1*u2": 1.0},
    ],
    "thomas": [
        {"u1": -0.18, "sin(u2)": 1.0},
        {"u2": -0.18, "sin(u3)": 1.0},
        {"u3": -0.18, "sin(u1)": 1.0},
    ],
}
