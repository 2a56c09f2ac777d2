#include "geomag/trajectory.hpp"

#include <cmath>

#include "geomag/errors.hpp"

namespace geomag {

FieldTrajectory::FieldTrajectory(double sample_interval, std::vector<double> samples)
    : dt_(sample_interval), samples_(std::move(samples)) {
  if (!(dt_ > 0.0)) throw InvalidParameter("trajectory sample interval must be positive");
  if (samples_.empty()) throw InvalidParameter("trajectory needs at least one sample");
}

double FieldTrajectory::duration() const noexcept {
  return samples_.empty() ? 0.0 : dt_ * static_cast<double>(samples_.size() - 1);
}

double FieldTrajectory::operator()(double t) const {
  if (samples_.empty()) return 0.0;
  if (t <= 0.0) return samples_.front();
  const double u = t / dt_;
  const auto i = static_cast<std::size_t>(u);
  if (i + 1 >= samples_.size()) return samples_.back();
  const double frac = u - static_cast<double>(i);
  return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
}

}  // namespace geomag
