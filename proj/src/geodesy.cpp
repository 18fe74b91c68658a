#include "asv/geodesy.hpp"

#include <cmath>
#include <stdexcept>

#include "asv/common.hpp"

namespace asv {

namespace {

// WGS84
constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kLon0 = deg2rad(15.0);  // zone 33 central meridian

const double kE = std::sqrt(kF * (2.0 - kF));
const double kN = kF / (2.0 - kF);
// rectifying radius and the Krueger series coefficients (4th order in n)
const double kRect = kA / (1.0 + kN) * (1.0 + kN * kN / 4.0 + std::pow(kN, 4) / 64.0);
const double kAlpha[4] = {
    kN / 2.0 - 2.0 * kN * kN / 3.0 + 5.0 * std::pow(kN, 3) / 16.0 +
        41.0 * std::pow(kN, 4) / 180.0,
    13.0 * kN * kN / 48.0 - 3.0 * std::pow(kN, 3) / 5.0 + 557.0 * std::pow(kN, 4) / 1440.0,
    61.0 * std::pow(kN, 3) / 240.0 - 103.0 * std::pow(kN, 4) / 140.0,
    49561.0 * std::pow(kN, 4) / 161280.0};
const double kBeta[4] = {
    kN / 2.0 - 2.0 * kN * kN / 3.0 + 37.0 * std::pow(kN, 3) / 96.0 -
        std::pow(kN, 4) / 360.0,
    kN * kN / 48.0 + std::pow(kN, 3) / 15.0 - 437.0 * std::pow(kN, 4) / 1440.0,
    17.0 * std::pow(kN, 3) / 480.0 - 37.0 * std::pow(kN, 4) / 840.0,
    4397.0 * std::pow(kN, 4) / 161280.0};

}  // namespace

UtmPoint utm33_from_latlon(double lat_deg, double lon_deg) {
  if (!(lat_deg > -80.0 && lat_deg < 84.0))
    throw std::invalid_argument("utm33: latitude out of the (-80, 84) degree domain");
  if (!std::isfinite(lon_deg)) throw std::invalid_argument("utm33: longitude must be finite");

  const double phi = deg2rad(lat_deg);
  const double lam = wrap_angle(deg2rad(lon_deg) - kLon0);

  const double t = std::tan(phi);
  const double sigma = std::sinh(kE * std::atanh(kE * t / std::sqrt(1.0 + t * t)));
  const double tc = t * std::sqrt(1.0 + sigma * sigma) - sigma * std::sqrt(1.0 + t * t);

  const double xi_p = std::atan2(tc, std::cos(lam));
  const double eta_p = std::asinh(std::sin(lam) / std::hypot(tc, std::cos(lam)));

  double xi = xi_p, eta = eta_p;
  for (int j = 1; j <= 4; ++j) {
    xi += kAlpha[j - 1] * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
    eta += kAlpha[j - 1] * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
  }
  return {kFalseEasting + kK0 * kRect * eta, kK0 * kRect * xi};
}

void latlon_from_utm33(const UtmPoint& p, double& lat_deg, double& lon_deg) {
  const double xi = p.northing / (kK0 * kRect);
  const double eta = (p.easting - kFalseEasting) / (kK0 * kRect);

  double xi_p = xi, eta_p = eta;
  for (int j = 1; j <= 4; ++j) {
    xi_p -= kBeta[j - 1] * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
    eta_p -= kBeta[j - 1] * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
  }

  const double tc = std::sin(xi_p) / std::sqrt(std::sinh(eta_p) * std::sinh(eta_p) +
                                               std::cos(xi_p) * std::cos(xi_p));
  // invert the conformal latitude by Newton iteration on tau
  double t = tc;
  for (int i = 0; i < 8; ++i) {
    const double sigma = std::sinh(kE * std::atanh(kE * t / std::sqrt(1.0 + t * t)));
    const double f = t * std::sqrt(1.0 + sigma * sigma) - sigma * std::sqrt(1.0 + t * t) - tc;
    const double df = (std::sqrt((1.0 + sigma * sigma) * (1.0 + t * t)) - sigma * t) *
                      (1.0 - kE * kE) * std::sqrt(1.0 + t * t) /
                      (1.0 + (1.0 - kE * kE) * t * t);
    t -= f / df;
  }
  lat_deg = rad2deg(std::atan(t));
  lon_deg = rad2deg(wrap_angle(kLon0 + std::atan2(std::sinh(eta_p), std::cos(xi_p))));
}

}  // namespace asv
