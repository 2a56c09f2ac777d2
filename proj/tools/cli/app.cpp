#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "geomag/errors.hpp"
#include "version.hpp"

namespace geomag::cli {

namespace {

// Leftover "--key value" / "--key=value" pairs become config overrides.
void apply_overrides(const std::vector<std::string>& extras, Config& config) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) {
      throw ConfigError(a, 0, "unexpected argument (overrides take the form --key value)");
    }
    std::string key = a.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError(key, 0, "override is missing its value");
      value = extras[++i];
    }
    for (char& ch : key) {
      if (ch == '-') ch = '_';
    }
    config.set_override(key, value);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& console, std::ostream& log) {
  CLI::App app{"Two-level spin magnetometry simulator", "geomag"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::string config_path, out;
  std::string seed, workers;
  app.add_option("--config", config_path, "Configuration file (key = value lines)");
  app.add_option("--seed", seed, "Random seed (u64)");
  app.add_option("--out", out, "Output path, or prefix for decohere");
  app.add_option("--workers", workers, "Parallel workers");
  const std::vector<std::pair<std::string, std::string>> about{
      {"signal", "Signal curve P(B) as CSV"},
      {"sweep", "Parameter sweep as JSON lines with power-law fits"},
      {"estimate", "Field estimate from a measured signal (and slope)"},
      {"decohere", "Coherence curves, T2g regimes and spectral overlay"},
      {"calibrate", "Bath parameters for given T2* and T2"},
  };
  for (const auto& [name, help] : about) {
    auto* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    // Global flags given after the command land here; --seed/--out/--workers
    // also work as plain overrides.
    sub->add_option("--config", config_path, "Configuration file (key = value lines)");
  }

  std::vector<std::string> argv_copy(args.rbegin(), args.rend());
  try {
    app.parse(argv_copy);
  } catch (const CLI::CallForHelp&) {
    console << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    console << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    log << "geomag: " << e.what() << '\n';
    return kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    Config config(command_schema(command));
    if (!config_path.empty()) config.load_file(config_path);
    apply_overrides(sub->remaining(), config);
    if (!seed.empty()) config.set_override("seed", seed);
    if (!workers.empty()) config.set_override("workers", workers);
    if (!out.empty()) config.set_override("out", out);
    return run_command(command, config, console, log);
  } catch (const ConfigError& e) {
    log << "geomag: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidParameter& e) {
    log << "geomag: invalid parameter: " << e.what() << '\n';
    return kConfigError;
  } catch (const OutOfRange& e) {
    log << "geomag: measurement out of range: " << e.what() << '\n';
    return kConfigError;
  } catch (const QuadratureFailure& e) {
    log << "geomag: quadrature failure: " << e.what() << " (error estimate " << e.error_estimate()
        << ", worst interval near omega = " << e.worst_frequency() << " rad/s)\n";
    return kComputationError;
  } catch (const std::exception& e) {
    log << "geomag: computation error: " << e.what() << '\n';
    return kComputationError;
  }
}

}  // namespace geomag::cli
