#include "stormwarn/geo.hpp"

#include <cmath>

namespace stormwarn {

double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg,
                    double lon2_deg) {
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  const double phi1 = lat1_deg * kDegToRad;
  const double phi2 = lat2_deg * kDegToRad;
  const double dphi = (lat2_deg - lat1_deg) * kDegToRad;
  const double dlam = (lon2_deg - lon1_deg) * kDegToRad;
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlam / 2.0);
  const double a = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace stormwarn
