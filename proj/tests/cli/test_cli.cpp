#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "geomag/analytic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using geomag::cli::run;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string log;
};

Run call(std::vector<std::string> args) {
  std::ostringstream out, log;
  Run r;
  r.code = run(args, out, log);
  r.out = out.str();
  r.log = log.str();
  return r;
}

// fresh directory per test case
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("geomag_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string c;
  while (std::getline(in, c, ',')) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<nlohmann::json> jsonl(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help exit cleanly") {
  auto v = call({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find('.') != std::string::npos);
  CHECK(call({"--help"}).code == 0);
  CHECK(call({}).code == 2);
  CHECK(call({"levitate"}).code == 2);
}

TEST_CASE("signal echoes the resolved configuration") {
  auto r = call({"signal", "--protocol", "ramsey", "--t_us", "1", "--b_mt", "0,0.01"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# geomag ", 0) == 0);
  CHECK(r.out.find("# command = signal") != std::string::npos);
  CHECK(r.out.find("# t_us = 1\n") != std::string::npos);
  CHECK(r.out.find("# gamma_ghz_per_t = 28") != std::string::npos);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "B_mT,P,engine,protocol,omega_MHz,N,T_us");
}

TEST_CASE("ramsey fringe period") {
  // one period of cos(gamma B T) at T = 1 us is 1/(28 GHz/T * 1 us) = 35.714 uT
  auto r = call({"signal", "--protocol", "ramsey", "--t_us", "1", "--b_mt",
                 "0,0.0178571428571,0.0357142857143"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(std::stod(cells(lines[1])[1]) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::stod(cells(lines[2])[1]) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(std::stod(cells(lines[3])[1]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("berry curve reaches its last minimum near B_max") {
  geomag::GeometricModel m;
  m.rabi = 2.0 * M_PI * 1e6;
  m.rotations = 1;
  const double b_max_mt = geomag::berry_field_range(m) * 1e3;
  auto r = call({"signal", "--protocol", "berry", "--omega_mhz", "1", "--n", "1", "--t_us", "100",
                 "--b_min_mt", std::to_string(0.9 * b_max_mt), "--b_max_mt",
                 std::to_string(b_max_mt), "--b_points", "401"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 402);
  double best_p = 2.0, best_b = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = cells(lines[i]);
    const double p = std::stod(c[1]);
    if (p < best_p) {
      best_p = p;
      best_b = std::stod(c[0]);
    }
  }
  CHECK(best_p == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(best_b == doctest::Approx(b_max_mt).epsilon(2e-3));
}

TEST_CASE("configuration errors exit with 2") {
  const auto dir = scratch("config");
  CHECK(call({"signal", "--protocol", "ramsey", "--t_us", "1", "--b_mt", ""}).code == 2);
  CHECK(call({"signal", "--protocol", "ramsey", "--t_us", "1", "--b_points", "0"}).code == 2);
  CHECK(call({"signal", "--protocol", "ramsey", "--t_us", "-1", "--b_mt", "0.1"}).code == 2);
  CHECK(call({"signal", "--protocol", "hahn", "--engine", "analytic", "--b_mt", "0.1"}).code == 2);
  CHECK(call({"signal", "--bogus", "1"}).code == 2);
  CHECK(call({"signal", "--t_us"}).code == 2);
  CHECK(call({"calibrate", "--t2star_us", "abc"}).code == 2);
  CHECK(call({"signal", "--config", (dir / "missing.cfg").string()}).code == 2);

  put(dir / "bad.cfg", "protocol = ramsey\n# comment\n\nmystery = 3\n");
  auto r = call({"signal", "--config", (dir / "bad.cfg").string()});
  CHECK(r.code == 2);
  CHECK(r.log.find("line 4") != std::string::npos);
  CHECK(r.log.find("mystery") != std::string::npos);

  put(dir / "dup.cfg", "t_us = 1\nt_us = 2\n");
  r = call({"signal", "--config", (dir / "dup.cfg").string()});
  CHECK(r.code == 2);
  CHECK(r.log.find("line 2") != std::string::npos);
}

TEST_CASE("command line overrides the config file") {
  const auto dir = scratch("override");
  put(dir / "s.cfg", "protocol = ramsey   # dynamic\nt_us = 2\nb_mt = 0, 0.01\n");
  auto r = call({"signal", "--config", (dir / "s.cfg").string(), "--t-us=1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# t_us = 1\n") != std::string::npos);
  CHECK(data_lines(r.out).size() == 3);
  auto g = call({"--config", (dir / "s.cfg").string(), "signal"});
  REQUIRE(g.code == 0);
  CHECK(g.out.find("# t_us = 2\n") != std::string::npos);
}

TEST_CASE("noisy signal is reproducible from its seed") {
  const auto dir = scratch("seed");
  const std::vector<std::string> base{"signal", "--protocol", "ramsey", "--engine", "noise",
                                      "--t_us", "2", "--b_mt", "0,0.002,0.005",
                                      "--t2star_us", "10", "--t2_us", "100", "--ensemble", "50"};
  auto with = [&](const std::string& seed, const std::string& workers, const std::string& file) {
    auto args = base;
    for (const auto& a : {std::string("--seed"), seed, std::string("--workers"), workers,
                          std::string("--out"), (dir / file).string()}) {
      args.push_back(a);
    }
    return call(args);
  };
  REQUIRE(with("7", "1", "a.csv").code == 0);
  REQUIRE(with("7", "3", "b.csv").code == 0);
  REQUIRE(with("8", "1", "c.csv").code == 0);
  const auto body = [&](const std::string& f) { return data_lines(slurp(dir / f)); };
  CHECK(body("a.csv") == body("b.csv"));
  CHECK(body("a.csv") != body("c.csv"));
}

TEST_CASE("sweep writes a header record, points and fits") {
  const auto dir = scratch("sweep");
  const auto out = (dir / "s.jsonl").string();
  auto r = call({"sweep", "--protocol", "ramsey", "--engine", "analytic", "--t_us", "1,2,4,8",
                 "--b_points", "41", "--fit", "eta", "--out", out});
  REQUIRE(r.code == 0);
  const auto recs = jsonl(slurp(out));
  REQUIRE(recs.size() == 6);
  CHECK(recs[0]["type"] == "header");
  CHECK(recs[0]["config"]["t_us"] == "1,2,4,8");
  for (int i = 1; i <= 4; ++i) {
    CHECK(recs[i]["type"] == "point");
    CHECK(recs[i]["ok"] == true);
  }
  REQUIRE(recs[5]["type"] == "fit");
  // eta of a Ramsey sweep over T goes as T^-1/2
  CHECK(recs[5]["exponents"][0].get<double>() == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("sweep reports partial and total failure") {
  const auto dir = scratch("partial");
  const auto out = (dir / "p.jsonl").string();
  const std::vector<std::string> base{"sweep", "--protocol", "berry", "--omega_mhz", "5",
                                      "--n", "1,10,60,200", "--t_us", "20", "--b_points", "2",
                                      "--t2star_us", "50", "--t2_us", "500", "--fit", "t2g",
                                      "--out", out};
  auto partial = base;
  partial.insert(partial.end(), {"--t2g_times_us", "5,10,20,40"});
  CHECK(call(partial).code == 4);
  auto recs = jsonl(slurp(out));
  int failed = 0;
  for (const auto& j : recs) {
    if (j["type"] == "point" && j["ok"] == false) {
      ++failed;
      CHECK(j["error"].get<std::string>().size() > 0);
    }
  }
  CHECK(failed == 1);

  auto total = base;
  total.insert(total.end(), {"--t2g_times_us", "1,2,3,5"});
  CHECK(call(total).code == 3);
}

TEST_CASE("estimate recovers a geometric field") {
  geomag::GeometricModel m;
  m.rabi = 2.0 * M_PI * 1e6;
  m.rotations = 1;
  const double b = 0.3 * geomag::berry_field_range(m);
  const double p = geomag::berry_signal(m, b);
  const double slope_per_mt = geomag::berry_slope(m, b) * 1e-3;
  std::ostringstream ps, ss;
  ps.precision(17);
  ss.precision(17);
  ps << p;
  ss << slope_per_mt;
  auto r = call({"estimate", "--protocol", "berry", "--omega_mhz", "1", "--n", "1", "--t_us",
                 "100", "--p", ps.str(), "--slope_per_mt", ss.str(), "--sigma", "1e-4"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "candidate,B_mT,lobe,slope_consistent,chosen");
  int chosen = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = cells(lines[i]);
    if (c[4] == "1") {
      ++chosen;
      CHECK(std::stod(c[1]) == doctest::Approx(b * 1e3).epsilon(1e-4));
    }
  }
  CHECK(chosen == 1);
}

TEST_CASE("estimate exit codes") {
  CHECK(call({"estimate", "--p", "1", "--slope_per_mt", "0"}).code == 5);
  CHECK(call({"estimate", "--p", "0.3"}).code == 2);
  CHECK(call({"estimate", "--p", "1.5", "--slope_per_mt", "1", "--sigma", "0.01"}).code == 2);

  auto r = call({"estimate", "--protocol", "ramsey", "--t_us", "1", "--p", "0.5",
                 "--window_max_mt", "0.18"});
  REQUIRE(r.code == 0);
  // five periods of 35.7 uT, two roots per period
  CHECK(data_lines(r.out).size() == 1 + 10);
}

TEST_CASE("decohere writes its three tables") {
  const auto dir = scratch("decohere");
  const auto prefix = (dir / "d").string();
  auto r = call({"decohere", "--a", "0,0.1,0.3,1", "--t_points", "40", "--overlay_a", "0",
                 "--overlay_points", "50", "--out", prefix});
  REQUIRE(r.code == 0);
  const auto coh = data_lines(slurp(prefix + "_coherence.csv"));
  REQUIRE(coh.size() == 1 + 4 * 40);
  CHECK(coh[0] == "A,T_us,W,chi_geometric,chi_dynamic");
  for (std::size_t i = 1; i < coh.size(); ++i) {
    const double w = std::stod(cells(coh[i])[2]);
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
  }
  const auto reg = data_lines(slurp(prefix + "_regimes.csv"));
  REQUIRE(reg.size() == 1 + 4);
  CHECK(reg[0] == "A,T2g_us,fit_residual,regime,status");

  const auto ov = data_lines(slurp(prefix + "_overlay.csv"));
  REQUIRE(ov.size() == 1 + 50);
  CHECK(ov[0] == "omega_rad_s,S,geometric,dynamic");
  for (std::size_t i = 1; i < ov.size(); ++i) CHECK(std::stod(cells(ov[i])[2]) == 0.0);
}

TEST_CASE("decohere refuses strongly nonadiabatic A without Monte Carlo") {
  const auto dir = scratch("strong");
  const auto prefix = (dir / "d").string();
  auto r = call({"decohere", "--a", "0.1,5", "--t_points", "10", "--out", prefix});
  CHECK(r.code == 4);
  const auto reg = data_lines(slurp(prefix + "_regimes.csv"));
  REQUIRE(reg.size() == 3);
  CHECK(reg[2].find("strongly-nonadiabatic") != std::string::npos);
}

TEST_CASE("quadrature failure exits with 3 and names the frequency") {
  const auto dir = scratch("quad");
  auto r = call({"decohere", "--quad_budget", "1", "--out", (dir / "q").string()});
  CHECK(r.code == 3);
  CHECK(r.log.find("omega") != std::string::npos);
}

TEST_CASE("calibrate") {
  const auto dir = scratch("calibrate");
  const auto out = (dir / "c.csv").string();
  REQUIRE(call({"calibrate", "--t2star_us", "50", "--t2_us", "500", "--out", out}).code == 0);
  const auto lines = data_lines(slurp(out));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "delta_rad_s,tau_c_us,t2star_us,t2_us,residual");
  const auto c = cells(lines[1]);
  CHECK(std::stod(c[0]) == doctest::Approx(28313.152).epsilon(1e-6));
  CHECK(std::stod(c[1]) == doctest::Approx(8161.23).epsilon(1e-6));

  CHECK(call({"calibrate", "--t2star_us", "500", "--t2_us", "50"}).code != 0);
}

}
