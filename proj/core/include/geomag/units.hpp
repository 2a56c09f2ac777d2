#pragma once

#include <numbers>

namespace geomag {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Internal quantities are SI: angular frequencies in rad/s, fields in tesla,
// times in seconds. The helpers below convert from the interface units
// (MHz as ordinary frequency, mT, us).
namespace units {

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double angular_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }

constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }

constexpr double mt_to_tesla(double mt) { return mt * 1e-3; }
constexpr double tesla_to_mt(double t) { return t * 1e3; }

}  // namespace units

/// NV-centre constants. Only gamma and hyperfine_splitting enter the models;
/// the other two are kept for reference output.
struct PhysicalConstants {
  double gamma = kTwoPi * 28e9;                  // rad s^-1 T^-1
  double zero_field_splitting = kTwoPi * 2.87e9;  // rad/s
  double hyperfine_splitting = kTwoPi * 2.16e6;   // rad/s
  double bias_field = 9.6e-3;                     // T (96 G)

  /// Throws InvalidParameter unless gamma > 0 and hyperfine_splitting > 0.
  void validate() const;
};

}  // namespace geomag
