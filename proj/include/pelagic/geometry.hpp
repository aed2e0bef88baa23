#pragma once

#include <cmath>
#include <ostream>

namespace pelagic {

// Local Cartesian frame in meters (planning scenarios). z is altitude above
// sea level. AIS analytics use LatLon instead; the two frames never mix.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double horizontal_norm() const { return std::hypot(x, y); }

    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline double horizontal_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline Vec3 midpoint(const Vec3& a, const Vec3& b) { return (a + b) * 0.5; }

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

// Geographic coordinate in degrees.
struct LatLon {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Great-circle distance on a spherical Earth.
inline double great_circle_km(const LatLon& a, const LatLon& b) {
    const double la = a.lat_deg * kDegToRad, lb = b.lat_deg * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;
    const double dlat = lb - la;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(la) * std::cos(lb) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

} // namespace pelagic
