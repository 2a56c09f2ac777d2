#include "format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "version.hpp"

namespace geomag::cli {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

double round9(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(num(v).c_str(), nullptr);
}

void write_header(std::ostream& out, const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& resolved) {
  out << "# geomag " << kVersion << '\n';
  out << "# command = " << command << '\n';
  for (const auto& [k, v] : resolved) out << "# " << k << " = " << v << '\n';
}

}  // namespace geomag::cli
