#pragma once

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ehrenfest/cutoff.hpp"
#include "ehrenfest/error.hpp"
#include "ehrenfest/gelfand.hpp"
#include "ehrenfest/krawtchouk.hpp"
#include "ehrenfest/urn_chain.hpp"

namespace ehrenfest {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

// Python-style "a+bj" for a complex cell.
inline std::string format_complex(cplx z) {
  return fmt::format("{:.17g}{}{:.17g}j", z.real(), std::signbit(z.imag()) ? "" : "+", z.imag());
}

namespace detail {

inline void dump_json(const Json& j, std::ostream& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out << (std::isfinite(v) ? format_double(v) : "null");
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(key).dump() << ": ";
        dump_json(value, out, indent, depth + 1);
      }
      out << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      auto scalar = [](const Json& e) { return !e.is_structured(); };
      if (std::all_of(j.begin(), j.end(), scalar)) {
        out << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          dump_json(j[i], out, 0, 0);
        }
        out << "]";
        return;
      }
      out << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out << (i ? ",\n" : "\n") << pad;
        dump_json(j[i], out, indent, depth + 1);
      }
      out << "\n" << close << "]";
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace detail

// JSON text with every float at 17 significant digits; non-finite floats become null.
inline std::string to_json_text(const Json& j, int indent = 2) {
  std::ostringstream out;
  detail::dump_json(j, out, indent, 0);
  out << "\n";
  return out.str();
}

// Write via a sibling temporary and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

// ---------------------------------------------------------------------------

inline Json complex_pair(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json spherical_json(const SphericalTable& st) {
  Json omega = Json::array();
  for (std::size_t i = 0; i < st.s; ++i) {
    Json row = Json::array();
    for (std::size_t t = 0; t < st.s; ++t) row.push_back(complex_pair(st.omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t))));
    omega.push_back(row);
  }
  Json j;
  j["s"] = st.s;
  j["r"] = st.r;
  j["m"] = st.m();
  j["valencies"] = st.valencies;
  j["dims"] = st.dims;
  j["omega"] = omega;
  j["all_real"] = st.all_real;
  j["M"] = st.M;
  j["generator_class"] = st.generator_class;
  return j;
}

// Header "k" then one label per column j; one row per k.
inline std::string krawtchouk_csv(const KrawtchoukTable& kt) {
  std::string out = "k";
  for (std::size_t j = 0; j < kt.size(); ++j) out += "," + kt.comps->label(j);
  out += "\n";
  for (std::size_t k = 0; k < kt.size(); ++k) {
    out += kt.comps->label(k);
    for (std::size_t j = 0; j < kt.size(); ++j) {
      out += ',';
      out += kt.real ? format_double(kt(k, j).real()) : format_complex(kt(k, j));
    }
    out += "\n";
  }
  return out;
}

inline constexpr const char* kDistributionHeader = "N,type_label,mass\n";

inline void append_distribution_rows(std::string& out, int N, const TypeDistribution& dist) {
  for (std::size_t idx = 0; idx < dist.size(); ++idx)
    out += fmt::format("{},{},{}\n", N, dist.types->label(idx), format_double(dist[idx]));
}

inline std::string tv_csv(const MixCurve& curve) {
  std::string out = "N,tv,method\n";
  const auto method = to_string(curve.method);
  for (std::size_t i = 0; i < curve.N.size(); ++i) out += fmt::format("{},{},{}\n", curve.N[i], format_double(curve.tv[i]), method);
  return out;
}

inline std::string c_key(double c) { return fmt::format("{}", c); }

inline Json cutoff_report_json(const Json& params, const MixCurve& curve) {
  Json j;
  j["params"] = params;
  Json schedule = Json::object();
  if (curve.schedule) {
    for (const auto& b : curve.bounds) {
      schedule[c_key(-b.c)] = b.t_minus;
    }
    schedule[c_key(0.0)] = curve.schedule->t_mix(0.0);
    for (const auto& b : curve.bounds) schedule[c_key(b.c)] = b.t_plus;
  }
  j["schedule"] = schedule;
  Json points = Json::array();
  for (std::size_t i = 0; i < curve.N.size(); ++i) points.push_back(Json::array({curve.N[i], curve.tv[i]}));
  j["curve"] = points;
  Json bounds = Json::array();
  for (const auto& b : curve.bounds) {
    Json upper;
    upper["c"] = b.c;
    upper["t_plus"] = b.t_plus;
    upper["tv_at_t_plus"] = b.tv_at_t_plus;
    upper["ub"] = b.ub;
    upper["pass"] = b.pass;
    upper["lemma_bound"] = b.lemma_bound;
    bounds.push_back(upper);
    Json lower;
    lower["c"] = b.c;
    lower["t_minus"] = b.t_minus;
    lower["tv_at_t_minus"] = b.tv_at_t_minus;
    bounds.push_back(lower);
  }
  j["bounds"] = bounds;
  Json assumptions;
  assumptions["all_real"] = curve.assumptions.all_real;
  assumptions["M"] = curve.assumptions.M;
  assumptions["mp_ok"] = curve.assumptions.mp_ok;
  assumptions["M_below_one"] = curve.assumptions.M_below_one;
  assumptions["mp"] = curve.assumptions.mp;
  j["assumptions"] = assumptions;
  return j;
}

// Human-readable verdict table for stdout.
inline std::string verdict_table(const MixCurve& curve) {
  std::string out;
  if (!curve.schedule) {
    out += "no cutoff schedule: ";
    out += !curve.assumptions.all_real ? "spherical functions are not real" : "M >= 1 or mp = 0";
    out += "\n";
    return out;
  }
  if (!curve.assumptions.mp_ok) out += "note: mp outside (0, 1/2]; bound hypotheses do not hold\n";
  out += fmt::format("{:>6} {:>8} {:>22} {:>22} {:>22} {:>6} {:>8} {:>22}\n", "c", "t_plus", "tv(t_plus)", "ub",
                     "sqrt(lemma sum)", "pass", "t_minus", "tv(t_minus)");
  for (const auto& b : curve.bounds) {
    out += fmt::format("{:>6} {:>8} {:>22} {:>22} {:>22} {:>6} {:>8} {:>22}\n", c_key(b.c), b.t_plus,
                       format_double(b.tv_at_t_plus), format_double(b.ub), format_double(b.lemma_bound),
                       b.pass ? "yes" : "no", b.t_minus, format_double(b.tv_at_t_minus));
  }
  return out;
}

}  // namespace ehrenfest
