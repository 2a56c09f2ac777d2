#include <algorithm>
#include <cmath>
#include <limits>

#include "geomag/errors.hpp"
#include "geomag/noise.hpp"

namespace geomag {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

SpectralDensity::SpectralDensity(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const Lorentzian& l) {
                   if (!(l.delta >= 0.0) || !std::isfinite(l.delta)) {
                     throw InvalidParameter("Lorentzian amplitude must be >= 0");
                   }
                   if (!(l.correlation_time > 0.0) || !std::isfinite(l.correlation_time)) {
                     throw InvalidParameter("Lorentzian correlation time must be > 0");
                   }
                 },
                 [](const WhiteNoise& w) {
                   if (!(w.level >= 0.0) || !std::isfinite(w.level)) {
                     throw InvalidParameter("white-noise level must be >= 0");
                   }
                 },
                 [](const OneOverF& f) {
                   if (!(f.amplitude >= 0.0)) throw InvalidParameter("1/f amplitude must be >= 0");
                   if (!(f.low_cutoff > 0.0 && f.high_cutoff > f.low_cutoff)) {
                     throw InvalidParameter("1/f cutoffs must satisfy 0 < low < high");
                   }
                 },
             },
             family_);
}

double SpectralDensity::operator()(double omega) const {
  const double w = std::abs(omega);
  return std::visit(Overloaded{
                        [w](const Lorentzian& l) {
                          const double x = w * l.correlation_time;
                          return 2.0 * l.delta * l.delta * l.correlation_time / (1.0 + x * x);
                        },
                        [](const WhiteNoise& n) { return n.level; },
                        [w](const OneOverF& f) {
                          if (w > f.high_cutoff) return 0.0;
                          return f.amplitude / std::max(w, f.low_cutoff);
                        },
                    },
                    family_);
}

double SpectralDensity::tail_integral(double omega) const {
  if (!(omega > 0.0)) return std::numeric_limits<double>::infinity();
  return std::visit(
      Overloaded{
          [omega](const Lorentzian& l) {
            // 2 d^2 tau [1/w - tau atan(1/(w tau))], expanded when 1/(w tau) is small.
            const double tau = l.correlation_time;
            const double z = 1.0 / (omega * tau);
            double bracket;
            if (z < 1e-2) {
              const double z2 = z * z;
              bracket = tau * z * z2 * (1.0 / 3.0 - z2 / 5.0 + z2 * z2 / 7.0);
            } else {
              bracket = 1.0 / omega - tau * std::atan(z);
            }
            return 2.0 * l.delta * l.delta * tau * bracket;
          },
          [omega](const WhiteNoise& n) { return n.level / omega; },
          [omega](const OneOverF& f) {
            if (omega >= f.high_cutoff) return 0.0;
            const double hi2 = 1.0 / (f.high_cutoff * f.high_cutoff);
            if (omega >= f.low_cutoff) return 0.5 * f.amplitude * (1.0 / (omega * omega) - hi2);
            const double lo = f.low_cutoff;
            return f.amplitude / lo * (1.0 / omega - 1.0 / lo) +
                   0.5 * f.amplitude * (1.0 / (lo * lo) - hi2);
          },
      },
      family_);
}

std::vector<double> SpectralDensity::scales() const {
  return std::visit(Overloaded{
                        [](const Lorentzian& l) { return std::vector<double>{1.0 / l.correlation_time}; },
                        [](const WhiteNoise&) { return std::vector<double>{}; },
                        [](const OneOverF& f) {
                          return std::vector<double>{f.low_cutoff, f.high_cutoff};
                        },
                    },
                    family_);
}

double SpectralDensity::support_end() const {
  if (const auto* f = std::get_if<OneOverF>(&family_)) return f->high_cutoff;
  return std::numeric_limits<double>::infinity();
}

bool SpectralDensity::is_zero() const {
  return std::visit(Overloaded{
                        [](const Lorentzian& l) { return l.delta == 0.0; },
                        [](const WhiteNoise& n) { return n.level == 0.0; },
                        [](const OneOverF& f) { return f.amplitude == 0.0; },
                    },
                    family_);
}

double filter_function(FilterKind kind, double x) {
  switch (kind) {
    case FilterKind::GeometricF0: {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s;
    }
    case FilterKind::DynamicF1: {
      const double s = std::sin(0.25 * x);
      const double s2 = s * s;
      return 8.0 * s2 * s2;
    }
  }
  return 0.0;
}

}  // namespace geomag
