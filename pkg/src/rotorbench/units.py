"""Unit conversion constants shared across the package.

Body rates are rad/s inside the dynamics and deg/s at the environment
boundary (observations, traces, noise parameters).  Rotor speeds are RPM
inside the motor model and rad/s inside the dynamics.
"""

import math

DEG_PER_RAD = 180.0 / math.pi
RAD_PER_DEG = math.pi / 180.0

# One RPM in rad/s and back.
RADS_PER_RPM = 2.0 * math.pi / 60.0
RPM_PER_RADS = 60.0 / (2.0 * math.pi)


def rpm_to_rads(rpm):
    return rpm * RADS_PER_RPM


def rads_to_rpm(rads):
    return rads * RPM_PER_RADS


def rad_to_deg(x):
    return x * DEG_PER_RAD


def deg_to_rad(x):
    return x * RAD_PER_DEG
