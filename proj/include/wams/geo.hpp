#pragma once

#include <stdexcept>

namespace wams {

/// WGS84 geographic position, degrees / meters above ellipsoid.
struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;
    double altitude = 0.0;
};

struct UtmPoint {
    double easting = 0.0;  // m, false easting 500000 at the central meridian
    double northing = 0.0; // m
    int zone = 0;          // 1..60
    bool north = true;
};

/// UTM zone containing a longitude.
int utm_zone_for(double longitude);

/// Central meridian of a zone, degrees.
double utm_central_meridian(int zone);

/// Transverse Mercator forward projection, scale 0.9996, false easting 500 km.
/// Throws std::domain_error for |latitude| >= 84 degrees.
UtmPoint utm_forward(const GeoPoint& p, int zone);

/// Inverse projection; round-trips utm_forward to better than 1e-7 degrees.
GeoPoint utm_inverse(const UtmPoint& p);

} // namespace wams
