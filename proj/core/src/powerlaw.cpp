#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "geomag/errors.hpp"
#include "geomag/harness.hpp"

namespace geomag {

std::string_view to_string(Response response) {
  switch (response) {
    case Response::Eta: return "eta";
    case Response::FieldRange: return "B_max";
    case Response::T2g: return "T2g";
  }
  return "?";
}

std::string_view to_string(Control control) {
  switch (control) {
    case Control::Rabi: return "omega";
    case Control::Rotations: return "N";
    case Control::Time: return "T";
    case Control::Adiabaticity: return "A";
  }
  return "?";
}

PowerLawFit fit_power_law(std::span<const std::vector<double>> columns, std::span<const double> y,
                          std::vector<Control> controls) {
  const std::size_t n = y.size();
  const std::size_t k = columns.size();
  const std::size_t p = k + 1;
  for (const auto& c : columns) {
    if (c.size() != n) throw InvalidParameter("power-law columns and responses differ in length");
  }
  if (n < p) throw FitFailure("power-law fit has fewer samples than parameters");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) throw FitFailure("power-law responses must be positive");
    ly(static_cast<Eigen::Index>(i)) = std::log(y[i]);
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::set<double> distinct;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = columns[j][i];
      if (!(v > 0.0) || !std::isfinite(v)) throw FitFailure("power-law controls must be positive");
      distinct.insert(v);
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = std::log(v);
    }
    if (distinct.size() < 3) throw FitFailure("each fitted control needs at least three distinct values");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(p)) throw FitFailure("power-law design matrix is rank deficient");
  const Eigen::VectorXd beta = qr.solve(ly);
  const Eigen::VectorXd residual = ly - x * beta;
  const double rss = residual.squaredNorm();
  const double mean = ly.mean();
  const double tss = (ly.array() - mean).square().sum();

  PowerLawFit fit;
  fit.controls = std::move(controls);
  fit.samples = n;
  fit.log_prefactor = beta(0);
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  fit.rms_log_residual = std::sqrt(rss / static_cast<double>(n));
  const double s2 = n > p ? rss / static_cast<double>(n - p) : 0.0;
  const Eigen::MatrixXd cov = s2 * (x.transpose() * x).inverse();
  for (std::size_t j = 0; j < k; ++j) {
    const auto idx = static_cast<Eigen::Index>(j + 1);
    fit.exponents.push_back(beta(idx));
    fit.std_errors.push_back(std::sqrt(std::max(0.0, cov(idx, idx))));
  }
  return fit;
}

PowerLawFit fit_power_law(const SweepResult& result, Response response,
                          std::vector<Control> controls) {
  if (controls.empty()) throw InvalidParameter("power-law fit needs at least one control");
  std::vector<std::vector<double>> columns(controls.size());
  std::vector<double> y;
  for (const auto& r : result.records) {
    if (!r.ok) continue;
    std::optional<double> value;
    switch (response) {
      case Response::Eta:
        if (r.sensitivity) value = r.sensitivity->eta;
        break;
      case Response::FieldRange: value = r.field_range; break;
      case Response::T2g:
        if (r.t2g) value = r.t2g->t2g;
        break;
    }
    if (!value) continue;
    std::vector<double> row;
    for (Control c : controls) {
      std::optional<double> v;
      switch (c) {
        case Control::Rabi: v = r.rabi; break;
        case Control::Rotations:
          if (r.rotations) v = static_cast<double>(*r.rotations);
          break;
        case Control::Time: v = r.interaction_time; break;
        case Control::Adiabaticity: v = r.adiabaticity; break;
      }
      if (!v) throw FitFailure("control " + std::string(to_string(c)) + " is not defined for this sweep");
      row.push_back(*v);
    }
    for (std::size_t j = 0; j < controls.size(); ++j) columns[j].push_back(row[j]);
    y.push_back(*value);
  }
  if (y.empty()) throw FitFailure("no successful records carry the requested response");
  return fit_power_law(columns, y, std::move(controls));
}

}  // namespace geomag
