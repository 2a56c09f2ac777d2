#pragma once

#include <cstddef>
#include <vector>

namespace geomag {

/// Uniformly sampled field offset b(t) (tesla), linearly interpolated between
/// samples and held constant past either end.
class FieldTrajectory {
 public:
  FieldTrajectory() = default;
  FieldTrajectory(double sample_interval, std::vector<double> samples);

  double operator()(double t) const;

  double sample_interval() const noexcept { return dt_; }
  double duration() const noexcept;
  const std::vector<double>& samples() const noexcept { return samples_; }
  bool empty() const noexcept { return samples_.empty(); }

 private:
  double dt_ = 0.0;
  std::vector<double> samples_;
};

}  // namespace geomag
