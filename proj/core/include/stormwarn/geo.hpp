#pragma once

namespace stormwarn {

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance in km between two points given in degrees.
double haversine_km(double lat1_deg, double lon1_deg, double lat2_deg,
                    double lon2_deg);

}  // namespace stormwarn
