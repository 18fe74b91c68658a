#pragma once

namespace asv {

// Planar coordinates in the forced UTM zone-33 frame (WGS84, central
// meridian 15 E, scale 0.9996, false easting 500 km). Northing is the signed
// meridian distance from the equator (no southern false northing).
struct UtmPoint {
  double easting = 0.0;   // m
  double northing = 0.0;  // m
};

// Transverse-Mercator series projection, forced to zone 33 regardless of the
// point's natural zone. Latitude outside (-80, 84) degrees is rejected.
UtmPoint utm33_from_latlon(double lat_deg, double lon_deg);

// Inverse projection; composes with the forward map to well below 1e-6 deg.
void latlon_from_utm33(const UtmPoint& p, double& lat_deg, double& lon_deg);

}  // namespace asv
