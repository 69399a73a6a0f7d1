#pragma once

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehrenfest/error.hpp"
#include "ehrenfest/families.hpp"
#include "ehrenfest/report.hpp"
#include "ehrenfest/urn_chain.hpp"

namespace ehrenfest {

inline constexpr const char* kOutputDirEnv = "EHRENFEST_OUTPUT_DIR";

inline std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : std::string(".");
}

struct RunConfig {
  std::string family = "symmetric:3";
  std::string subgroup;  // empty: the family's standard subgroup
  std::string x0;        // empty: first element outside L
  int n = 4;
  std::optional<double> p;
  std::optional<double> mp;
  std::optional<int> steps;
  std::vector<double> cs{0.5, 1.0, 2.0, 3.0};
  std::string method = "lumped";
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  int stride = 0;
  std::string output_dir = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  std::string resolved_subgroup() const {
    if (!subgroup.empty()) return subgroup;
    const auto spec = GroupSpec::parse(family);
    switch (spec.family) {
      case GroupSpec::Family::symmetric:
        return "stabilizer";
      case GroupSpec::Family::dihedral:
        return "b";
      case GroupSpec::Family::product:
        return spec.factors[0].to_string() == spec.factors[1].to_string() ? "diagonal" : "trivial";
      default:
        return "trivial";
    }
  }

  PairSpec pair() const { return {family, resolved_subgroup(), x0}; }

  ModelParams params(int m) const {
    if (p.has_value() == mp.has_value()) throw ParameterError("give exactly one of --p and --mp");
    return p ? ModelParams::make(n, *p, m) : ModelParams::from_mp(n, *mp, m);
  }

  std::string to_toml() const {
    auto quote = [](const std::string& v) { return Json(v).dump(); };
    std::string out;
    out += "family = " + quote(family) + "\n";
    if (!subgroup.empty()) out += "subgroup = " + quote(subgroup) + "\n";
    if (!x0.empty()) out += "x0 = " + quote(x0) + "\n";
    out += fmt::format("n = {}\n", n);
    if (p) out += "p = " + format_double(*p) + "\n";
    if (mp) out += "mp = " + format_double(*mp) + "\n";
    if (steps) out += fmt::format("N = {}\n", *steps);
    out += "c = [";
    for (std::size_t i = 0; i < cs.size(); ++i) out += (i ? ", " : "") + format_double(cs[i]);
    out += "]\n";
    out += "method = " + quote(method) + "\n";
    out += fmt::format("seed = {}\ntrials = {}\nstride = {}\n", seed, trials, stride);
    out += "output-dir = " + quote(output_dir) + "\n";
    return out;
  }
};

// Registers the run options on an app. Call finish() after parsing to move
// optional values into the config; pass argv so that a --p or --mp flag
// replaces the other one coming from a config file.
class ConfigBinding {
 public:
  ConfigBinding(CLI::App& app, RunConfig& cfg) : cfg_(&cfg) {
    cfg.output_dir = default_output_dir();
    app.add_option("--family", cfg.family, "group: symmetric:R, cyclic:R, dihedral:R, cayley:PATH, product(A,B)");
    app.add_option("--subgroup", cfg.subgroup, "subgroup L: generator list, trivial, stabilizer or diagonal");
    app.add_option("--x0", cfg.x0, "generator x0: element index or name");
    app.add_option("--n", cfg.n, "number of balls")->check(CLI::PositiveNumber);
    p_ = app.add_option("--p", p_value_, "move probability per neighbour");
    mp_ = app.add_option("--mp", mp_value_, "total move probability m*p");
    steps_ = app.add_option("--N", steps_value_, "number of steps")->check(CLI::NonNegativeNumber);
    app.add_option("--c", cfg.cs, "cutoff offsets c");
    app.add_option("--method", cfg.method, "lumped or spectral")->check(CLI::IsMember({"lumped", "spectral"}));
    app.add_option("--seed", cfg.seed, "Monte Carlo seed");
    app.add_option("--trials", cfg.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--stride", cfg.stride, "emit every stride-th step (0: last step only)")->check(CLI::NonNegativeNumber);
    app.add_option("--output-dir", cfg.output_dir, std::string("output directory (default $") + kOutputDirEnv + " or .)");
    app.set_config("--config", "", "TOML configuration file; flags override it");
  }

  void finish(int argc = 0, const char* const* argv = nullptr) {
    bool p_flag = false, mp_flag = false;
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      p_flag = p_flag || arg == "--p" || arg.rfind("--p=", 0) == 0;
      mp_flag = mp_flag || arg == "--mp" || arg.rfind("--mp=", 0) == 0;
    }
    bool use_p = p_->count() > 0, use_mp = mp_->count() > 0;
    if (use_p && use_mp && p_flag != mp_flag) (p_flag ? use_mp : use_p) = false;
    if (use_p && use_mp) throw ParameterError("--p and --mp are mutually exclusive");
    if (use_p) cfg_->p = p_value_;
    if (use_mp) cfg_->mp = mp_value_;
    if (steps_->count()) cfg_->steps = steps_value_;
  }

 private:
  RunConfig* cfg_;
  CLI::Option* p_ = nullptr;
  CLI::Option* mp_ = nullptr;
  CLI::Option* steps_ = nullptr;
  double p_value_ = 0.0;
  double mp_value_ = 0.0;
  int steps_value_ = 0;
};

inline RunConfig parse_toml(const std::string& text) {
  CLI::App app;
  RunConfig cfg;
  ConfigBinding binding(app, cfg);
  std::istringstream in(text);
  try {
    app.parse_from_stream(in);
  } catch (const CLI::ParseError& e) {
    throw ValidationError(std::string("configuration: ") + e.what());
  }
  binding.finish();
  return cfg;
}

}  // namespace ehrenfest
