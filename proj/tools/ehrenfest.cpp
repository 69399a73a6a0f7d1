#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "ehrenfest/config.hpp"
#include "ehrenfest/ehrenfest.hpp"
#include "ehrenfest/report.hpp"

namespace fs = std::filesystem;
using namespace ehrenfest;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCertification = 2, kNumerical = 3 };

constexpr double kOracleTol = 1e-9;

struct Context {
  RunConfig cfg;
  bool check_oracle = false;
};

fs::path output_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.output_dir) / name; }

void emit(const RunConfig& cfg, const std::string& name, const std::string& content) {
  const auto path = output_path(cfg, name);
  write_atomic(path, content);
  std::cerr << "wrote " << path.string() << "\n";
}

std::string x0_name(const RunConfig& cfg, const HomogeneousSpace& space) {
  if (!cfg.x0.empty()) return cfg.x0;
  return NamedGroup::build(GroupSpec::parse(cfg.family)).element_name(space.x0());
}

CertifiedPair certified(const RunConfig& cfg) { return CertifiedPair::build(cfg.pair()); }

Json params_json(const RunConfig& cfg, const UrnModel& model) {
  Json j;
  j["family"] = cfg.family;
  j["subgroup"] = cfg.resolved_subgroup();
  j["x0"] = x0_name(cfg, model.space());
  j["r"] = model.pair.r();
  j["s"] = model.pair.s();
  j["n"] = model.params.n;
  j["m"] = model.params.m;
  j["p"] = model.params.p;
  j["mp"] = model.params.mp();
  j["method"] = cfg.method;
  return j;
}

UrnModel make_model(const RunConfig& cfg) {
  auto pair = certified(cfg);
  const int m = pair.m();
  return UrnModel{std::move(pair), cfg.params(m)};
}

// Three-way agreement on a brute-force-sized copy of the model.
void check_oracle(const UrnModel& model) {
  const int n_small = std::min(model.params.n, brute_force_size(model.pair.r(), 4));
  const auto small = UrnModel::with_p(model.pair, n_small, model.params.p);
  const auto rep = three_way_agreement(small, 20);
  std::cout << fmt::format("oracle n={} N=0..{}: brute-lumped {}, spectral-lumped {}\n", n_small, rep.n_max,
                           format_double(rep.brute_vs_lumped),
                           rep.spectral_vs_lumped ? format_double(*rep.spectral_vs_lumped) : "skipped");
  if (rep.brute_vs_lumped > kOracleTol || (rep.spectral_vs_lumped && *rep.spectral_vs_lumped > kOracleTol)) {
    throw NumericalFailure("oracle disagreement exceeds 1e-9");
  }
}

int cmd_analyze_pair(const Context& ctx) {
  const auto space = ctx.cfg.pair().build();
  const auto analysis = analyze_pair(space);
  if (!analysis.certificate) {
    const auto& w = *analysis.certificate.witness;
    std::cerr << fmt::format("not a Gelfand pair: (A_{} A_{})({},{}) = {} but (A_{} A_{})({},{}) = {}\n", w.t, w.u, w.row,
                             w.col, w.tu, w.u, w.t, w.row, w.col, w.ut);
    Json j;
    j["gelfand"] = false;
    j["witness"] = {{"t", w.t}, {"u", w.u}, {"row", w.row}, {"col", w.col}, {"tu", w.tu}, {"ut", w.ut}};
    std::cout << to_json_text(j);
    return kCertification;
  }
  auto j = spherical_json(*analysis.spherical);
  j["x0"] = x0_name(ctx.cfg, space);
  j["gelfand"] = true;
  j["orthogonality_defect"] = orthogonality_defect(*analysis.spherical);
  const auto text = to_json_text(j);
  std::cout << text;
  emit(ctx.cfg, "spherical.json", text);
  return kOk;
}

int cmd_export_krawtchouk(const Context& ctx) {
  const auto pair = certified(ctx.cfg);
  const auto kt = build_table(pair.spherical, ctx.cfg.n);
  emit(ctx.cfg, "krawtchouk.csv", krawtchouk_csv(kt));
  return kOk;
}

int cmd_evolve(const Context& ctx) {
  const auto model = make_model(ctx.cfg);
  if (ctx.check_oracle) check_oracle(model);
  const int steps = ctx.cfg.steps.value_or(0);
  const int stride = ctx.cfg.stride;
  auto wanted = [&](int N) { return N == steps || (stride > 0 && N % stride == 0); };
  std::string out = kDistributionHeader;
  if (parse_method(ctx.cfg.method) == Method::lumped) {
    const auto kernel = model.lumped();
    auto mu = TypeDistribution::point_mass(kernel.types());
    for (int N = 0; N <= steps; ++N) {
      if (wanted(N)) append_distribution_rows(out, N, mu);
      if (N < steps) mu = kernel.step(mu);
    }
  } else {
    const auto kt = build_table(model.spherical(), model.params.n);
    const SpectralEvaluator eval(kt, model.spherical(), model.params);
    for (int N = 0; N <= steps; ++N)
      if (wanted(N)) append_distribution_rows(out, N, eval.distribution(N));
  }
  emit(ctx.cfg, "distribution.csv", out);
  emit(ctx.cfg, "run.toml", ctx.cfg.to_toml());
  return kOk;
}

MixCurve curve_for(const Context& ctx, const UrnModel& model) {
  CurveOptions opt;
  opt.method = parse_method(ctx.cfg.method);
  opt.cs = ctx.cfg.cs;
  for (double c : opt.cs)
    if (!(c > 0.0)) throw ParameterError("cutoff offsets c must be positive");
  if (ctx.cfg.steps) opt.n_max = *ctx.cfg.steps;
  return mixing_curve(model, opt);
}

int report(const Context& ctx, bool with_csv) {
  const auto model = make_model(ctx.cfg);
  if (ctx.check_oracle) check_oracle(model);
  const auto curve = curve_for(ctx, model);
  std::cout << verdict_table(curve);
  if (with_csv) emit(ctx.cfg, "tv.csv", tv_csv(curve));
  emit(ctx.cfg, "cutoff-report.json", to_json_text(cutoff_report_json(params_json(ctx.cfg, model), curve)));
  emit(ctx.cfg, "run.toml", ctx.cfg.to_toml());
  return kOk;
}

int cmd_simulate(const Context& ctx) {
  const auto model = make_model(ctx.cfg);
  const int steps = ctx.cfg.steps.value_or(0);
  const auto emp = simulate(model.params, model.space(), steps, ctx.cfg.trials, ctx.cfg.seed);
  std::optional<TypeDistribution> exact;
  try {
    exact = evolve_lumped(model.lumped(), steps);
  } catch (const GuardExceeded&) {
  }
  std::string out = exact ? "N,type_label,mass,exact,deviation\n" : kDistributionHeader;
  double worst = 0.0, worst_sigma = 0.0;
  const auto trials = static_cast<double>(ctx.cfg.trials);
  for (std::size_t idx = 0; idx < emp.frequencies.size(); ++idx) {
    const auto label = emp.frequencies.types->label(idx);
    if (!exact) {
      out += fmt::format("{},{},{}\n", steps, label, format_double(emp.frequencies[idx]));
      continue;
    }
    const double e = (*exact)[idx];
    const double dev = emp.frequencies[idx] - e;
    worst = std::max(worst, std::abs(dev));
    const double sigma = std::sqrt(e * (1.0 - e) / trials);
    if (sigma > 0) worst_sigma = std::max(worst_sigma, std::abs(dev) / sigma);
    out += fmt::format("{},{},{},{},{}\n", steps, label, format_double(emp.frequencies[idx]), format_double(e),
                       format_double(dev));
  }
  if (exact) std::cout << fmt::format("max deviation {} ({} sigma)\n", format_double(worst), format_double(worst_sigma));
  emit(ctx.cfg, "simulation.csv", out);
  emit(ctx.cfg, "run.toml", ctx.cfg.to_toml());
  return kOk;
}

int cmd_verify(const Context& ctx) {
  const auto space = ctx.cfg.pair().build();
  const auto analysis = analyze_pair(space);
  if (!analysis.certificate) {
    std::cout << "FAIL gelfand certificate\n";
    return kCertification;
  }
  std::cout << "PASS gelfand certificate\n";
  bool ok = true;
  auto line = [&](bool pass, const std::string& what, double value) {
    ok = ok && pass;
    std::cout << fmt::format("{} {} ({})\n", pass ? "PASS" : "FAIL", what, format_double(value));
  };
  const auto& st = *analysis.spherical;
  line(orthogonality_defect(st) <= kOracleTol, "orthogonality", orthogonality_defect(st));

  auto pair = CertifiedPair::build(space);
  const int n_small = std::min(ctx.cfg.n, brute_force_size(pair.r(), 4));
  const double mp = ctx.cfg.mp ? *ctx.cfg.mp : ctx.cfg.p ? *ctx.cfg.p * pair.m() : 0.5;
  const auto model = UrnModel::with_mp(pair, n_small, mp);
  const auto rep = three_way_agreement(model, 20);
  line(rep.brute_vs_lumped <= kOracleTol, fmt::format("brute vs lumped, n={}, N<=20", n_small), rep.brute_vs_lumped);
  if (rep.spectral_vs_lumped) {
    line(*rep.spectral_vs_lumped <= kOracleTol, fmt::format("spectral vs lumped, n={}, N<=20", n_small),
         *rep.spectral_vs_lumped);
    const auto kt = build_table(st, n_small);
    const double eig = eigen_relation_defect(model, kt);
    line(eig <= kOracleTol, "Krawtchouk eigenrelation", eig);
  }
  try {
    const auto q = V_pi_check(st, n_small);
    line(true, "uniform moments of Q", std::abs(q.variance - q.predicted));
  } catch (const ConsistencyError& e) {
    line(false, e.what(), std::nan(""));
  }
  if (st.all_real && st.s >= 2) {
    const auto q = linearization(st);
    const auto kernel = model.lumped();
    auto mu = TypeDistribution::point_mass(kernel.types());
    double worst = 0.0;
    for (int N = 0; N <= 20; ++N) {
      const auto closed = q_moments(st, q, model.params, N);
      const auto exact = exact_q_moments(mu, st, q.index);
      worst = std::max({worst, std::abs(closed.mean - exact.mean), std::abs(closed.variance - exact.variance)});
      mu = kernel.step(mu);
    }
    line(worst <= kOracleTol, "closed-form Q moments", worst);
  }
  return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Urn models on finite Gelfand pairs: spectra, exact laws and cutoff"};
  app.require_subcommand(1);
  Context ctx;
  ConfigBinding binding(app, ctx.cfg);
  app.add_flag("--check-oracle", ctx.check_oracle, "compare brute force, lumped and spectral laws on a small n");

  std::map<std::string, std::function<int()>> commands{
      {"analyze-pair", [&] { return cmd_analyze_pair(ctx); }},
      {"export-krawtchouk", [&] { return cmd_export_krawtchouk(ctx); }},
      {"evolve", [&] { return cmd_evolve(ctx); }},
      {"mix", [&] { return report(ctx, true); }},
      {"cutoff-report", [&] { return report(ctx, false); }},
      {"simulate", [&] { return cmd_simulate(ctx); }},
      {"verify", [&] { return cmd_verify(ctx); }},
  };
  const std::map<std::string, std::string> help{
      {"analyze-pair", "certify the pair and print its spherical table"},
      {"export-krawtchouk", "write the Krawtchouk table for n balls"},
      {"evolve", "exact type law after N steps"},
      {"mix", "tv curve, cutoff verdicts and report"},
      {"cutoff-report", "cutoff report JSON only"},
      {"simulate", "Monte Carlo type frequencies against the exact law"},
      {"verify", "run the oracle checks for the pair"},
  };
  for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();

  try {
    app.parse(argc, argv);
    binding.finish(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kUsage;
  }

  try {
    for (const auto* sub : app.get_subcommands()) return commands.at(sub->get_name())();
  } catch (const ConsistencyError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return kCertification;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const GuardExceeded& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
