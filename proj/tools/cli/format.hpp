#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace geomag::cli {

/// "%.9g"; the only number format used in output files.
std::string num(double v);
std::string num(const std::optional<double>& v);

/// v rounded to 9 significant digits, for JSON values.
double round9(double v);

/// `# ` prefixed block with tool version, command and every resolved key.
void write_header(std::ostream& out, const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& resolved);

}  // namespace geomag::cli
