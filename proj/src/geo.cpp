#include "wams/geo.hpp"

#include <cmath>

namespace wams {

namespace {

constexpr double kA = 6378137.0;                 // WGS84 semi-major axis
constexpr double kF = 1.0 / 298.257223563;       // flattening
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;
constexpr double kDeg = 3.14159265358979323846 / 180.0;

// Krueger n-series, order n^4 (sub-millimeter for city-scale use).
constexpr double kN = kF / (2.0 - kF);
const double kA1 = (kA / (1.0 + kN)) * (1.0 + kN * kN / 4.0 + kN * kN * kN * kN / 64.0);

struct Coeffs {
    double alpha[4];
    double beta[4];
};

Coeffs krueger_coeffs() {
    double n = kN, n2 = n * n, n3 = n2 * n, n4 = n3 * n;
    Coeffs c;
    c.alpha[0] = n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0;
    c.alpha[1] = 13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0;
    c.alpha[2] = 61.0 * n3 / 240.0 - 103.0 * n4 / 140.0;
    c.alpha[3] = 49561.0 * n4 / 161280.0;
    c.beta[0] = n / 2.0 - 2.0 * n2 / 3.0 + 37.0 * n3 / 96.0 - 1.0 * n4 / 360.0;
    c.beta[1] = n2 / 48.0 + n3 / 15.0 - 437.0 * n4 / 1440.0;
    c.beta[2] = 17.0 * n3 / 480.0 - 37.0 * n4 / 840.0;
    c.beta[3] = 4397.0 * n4 / 161280.0;
    return c;
}

const Coeffs kC = krueger_coeffs();

} // namespace

int utm_zone_for(double longitude) {
    int zone = static_cast<int>(std::floor((longitude + 180.0) / 6.0)) + 1;
    if (zone < 1) zone = 1;
    if (zone > 60) zone = 60;
    return zone;
}

double utm_central_meridian(int zone) { return zone * 6.0 - 183.0; }

UtmPoint utm_forward(const GeoPoint& p, int zone) {
    if (zone < 1 || zone > 60) throw std::domain_error("UTM zone out of range");
    if (std::abs(p.latitude) >= 84.0)
        throw std::domain_error("latitude outside transverse Mercator domain");

    double phi = p.latitude * kDeg;
    double lam = (p.longitude - utm_central_meridian(zone)) * kDeg;

    double e = std::sqrt(kF * (2.0 - kF));
    double t = std::sinh(std::atanh(std::sin(phi)) -
                         e * std::atanh(e * std::sin(phi)));
    double xip = std::atan2(t, std::cos(lam));
    double etap = std::asinh(std::sin(lam) / std::sqrt(t * t + std::cos(lam) * std::cos(lam)));

    double xi = xip;
    double eta = etap;
    for (int j = 1; j <= 4; ++j) {
        xi += kC.alpha[j - 1] * std::sin(2.0 * j * xip) * std::cosh(2.0 * j * etap);
        eta += kC.alpha[j - 1] * std::cos(2.0 * j * xip) * std::sinh(2.0 * j * etap);
    }

    UtmPoint out;
    out.zone = zone;
    out.north = p.latitude >= 0.0;
    out.easting = kFalseEasting + kK0 * kA1 * eta;
    out.northing = kK0 * kA1 * xi + (out.north ? 0.0 : kFalseNorthingSouth);
    return out;
}

GeoPoint utm_inverse(const UtmPoint& p) {
    if (p.zone < 1 || p.zone > 60) throw std::domain_error("UTM zone out of range");

    double xi = (p.northing - (p.north ? 0.0 : kFalseNorthingSouth)) / (kK0 * kA1);
    double eta = (p.easting - kFalseEasting) / (kK0 * kA1);

    double xip = xi;
    double etap = eta;
    for (int j = 1; j <= 4; ++j) {
        xip -= kC.beta[j - 1] * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
        etap -= kC.beta[j - 1] * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
    }

    double chi = std::asin(std::sin(xip) / std::cosh(etap));
    double lam = std::atan2(std::sinh(etap), std::cos(xip));

    // conformal latitude -> geographic latitude by fixed-point iteration
    // on sin(phi) = tanh(psi + e atanh(e sin(phi)))
    double e = std::sqrt(kF * (2.0 - kF));
    double psi = std::asinh(std::tan(chi));
    double sphi = std::tanh(psi);
    for (int i = 0; i < 10; ++i) {
        sphi = std::tanh(psi + e * std::atanh(e * sphi));
    }
    double phi = std::asin(sphi);

    GeoPoint out;
    out.latitude = phi / kDeg;
    out.longitude = utm_central_meridian(p.zone) + lam / kDeg;
    return out;
}

} // namespace wams
