#!/usr/bin/env python3
"""Independent transverse Mercator reference (Snyder series, WGS84 / UTM).

Evaluates the forward projection at 40-digit precision with mpmath and prints
easting/northing for the frozen reference points used by the geo test suite.

Usage: snyder_tm.py [lat lon zone]
"""
import sys

from mpmath import mp, mpf, sin, cos, tan, sqrt, radians

mp.dps = 40

A = mpf("6378137")  # WGS84 semi-major axis
F = 1 / mpf("298.257223563")
E2 = F * (2 - F)
EP2 = E2 / (1 - E2)
K0 = mpf("0.9996")


def central_meridian(zone):
    return mpf(-183 + 6 * zone)


def forward(lat_deg, lon_deg, zone):
    """Snyder (1987) eq. 8-9..8-13 / 3-21."""
    lat = radians(mpf(lat_deg))
    lon = radians(mpf(lon_deg))
    lon0 = radians(central_meridian(zone))

    n = A / sqrt(1 - E2 * sin(lat) ** 2)
    t = tan(lat) ** 2
    c = EP2 * cos(lat) ** 2
    a_ = (lon - lon0) * cos(lat)

    # meridional arc, Snyder eq. 3-21
    m = A * (
        (1 - E2 / 4 - 3 * E2**2 / 64 - 5 * E2**3 / 256) * lat
        - (3 * E2 / 8 + 3 * E2**2 / 32 + 45 * E2**3 / 1024) * sin(2 * lat)
        + (15 * E2**2 / 256 + 45 * E2**3 / 1024) * sin(4 * lat)
        - (35 * E2**3 / 3072) * sin(6 * lat)
    )

    easting = K0 * n * (
        a_
        + (1 - t + c) * a_**3 / 6
        + (5 - 18 * t + t**2 + 72 * c - 58 * EP2) * a_**5 / 120
    ) + 500000
    northing = K0 * (
        m
        + n
        * tan(lat)
        * (
            a_**2 / 2
            + (5 - t + 9 * c + 4 * c**2) * a_**4 / 24
            + (61 - 58 * t + t**2 + 600 * c - 330 * EP2) * a_**6 / 720
        )
    )
    if lat_deg < 0:
        northing += 10000000
    return easting, northing


REFERENCE = [
    (mpf("53.350530"), mpf("-2.882987"), 30),
    (mpf("0.0"), mpf("-3.0"), 30),
    (mpf("45.0"), mpf("9.0"), 32),
    (mpf("60.5"), mpf("5.1"), 31),
]


def main():
    points = REFERENCE
    if len(sys.argv) == 4:
        points = [(mpf(sys.argv[1]), mpf(sys.argv[2]), int(sys.argv[3]))]
    for lat, lon, zone in points:
        e, n = forward(lat, lon, zone)
        print(f"{lat} {lon} zone {zone}: easting {mp.nstr(e, 18)} "
              f"northing {mp.nstr(n, 18)}")


if __name__ == "__main__":
    main()
