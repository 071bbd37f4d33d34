#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wfs/checks.hpp"

namespace wfs {

inline constexpr const char* kReportVersion = "1.0.0";

using ojson = nlohmann::ordered_json;

struct RunConfig {
  std::uint64_t seed = 20240501;
  int samples = 50;
  Tolerances tolerances = Tolerances::defaults();
  std::vector<std::string> checks = {"all"};
};

struct SuiteConfig {
  ExampleConfig example;
  RunConfig run;
};

struct ReportDocument {
  std::string version;
  ojson config;
  std::vector<CheckReport> checks;
  std::vector<Flag> flags;
  std::string overall;

  bool operator==(const ReportDocument&) const = default;
};

// ---------------------------------------------------------------------------
// Configuration.

namespace detail {

inline int config_int(const ojson& v, const std::string& key, int lo) {
  if (!v.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > std::numeric_limits<int>::max()) throw ConfigError("config: '" + key + "' out of range");
  return static_cast<int>(x);
}

inline double config_real(const ojson& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace detail

/// Validates ranges shared by the CLI and config files.
inline void validate(const SuiteConfig& c) {
  const auto& e = c.example;
  if (e.family != "paper_R2ns" && e.family != "unit_tangent_flat") {
    throw ConfigError("unknown example family '" + e.family + "'");
  }
  if (e.n < 1 || e.s < 1) throw ConfigError("n and s must be positive");
  if (!(e.beta > 0.0) || !std::isfinite(e.beta)) throw ConfigError("beta must be positive");
  if (e.family == "unit_tangent_flat" && e.s != 1) throw ConfigError("unit_tangent_flat forces s = 1");
  if (c.run.samples < 1) throw ConfigError("samples must be at least 1");
  if (c.run.checks.empty()) throw ConfigError("empty check list");
}

/// Flat JSON object: family, n, s, beta, seed, samples, checks (string or
/// list of strings) and any number of "tol.NAME" entries.
inline SuiteConfig parse_config(const ojson& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SuiteConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "family") {
      if (!v.is_string()) throw ConfigError("config: 'family' must be a string");
      c.example.family = v.get<std::string>();
    } else if (key == "n") {
      c.example.n = detail::config_int(v, key, 1);
    } else if (key == "s") {
      c.example.s = detail::config_int(v, key, 1);
    } else if (key == "beta") {
      c.example.beta = detail::config_real(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError("config: 'seed' must be a non-negative integer");
      }
      c.run.seed = v.get<std::uint64_t>();
    } else if (key == "samples") {
      c.run.samples = detail::config_int(v, key, 1);
    } else if (key == "checks") {
      c.run.checks.clear();
      if (v.is_string()) {
        c.run.checks.push_back(v.get<std::string>());
      } else if (v.is_array()) {
        for (const auto& e : v) {
          if (!e.is_string()) throw ConfigError("config: 'checks' entries must be strings");
          c.run.checks.push_back(e.get<std::string>());
        }
      } else {
        throw ConfigError("config: 'checks' must be a string or a list");
      }
    } else if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
      c.run.tolerances.set(key.substr(4), detail::config_real(v, key));
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

inline SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ojson config_echo(const SuiteConfig& c) {
  ojson j;
  j["family"] = c.example.family;
  j["n"] = c.example.n;
  j["s"] = c.example.s;
  j["beta"] = c.example.beta;
  j["seed"] = c.run.seed;
  j["samples"] = c.run.samples;
  j["checks"] = c.run.checks;
  ojson tol = ojson::object();
  for (const auto& [k, v] : c.run.tolerances.values()) tol[k] = v;
  j["tolerances"] = tol;
  return j;
}

// ---------------------------------------------------------------------------
// Running.

namespace detail {

inline double finite_or_max(double v) {
  if (std::isnan(v)) return std::numeric_limits<double>::max();
  if (std::isinf(v)) return v > 0 ? std::numeric_limits<double>::max() : std::numeric_limits<double>::lowest();
  return v;
}

inline bool has_flag(const std::vector<Flag>& flags, const std::string& id) {
  return std::any_of(flags.begin(), flags.end(), [&](const Flag& f) { return f.id == id; });
}

}  // namespace detail

inline CheckContext make_context(const SuiteConfig& c) {
  const WeakFStructure S = build_example(c.example);
  return CheckContext(S, draw_samples(S.chart, c.run.samples, c.run.seed), c.run.tolerances, c.example);
}

inline ReportDocument run_suite(const SuiteConfig& c) {
  validate(c);
  CheckContext ctx = make_context(c);
  ReportDocument doc;
  doc.version = kReportVersion;
  doc.config = config_echo(c);
  doc.checks = run_checks(ctx, c.run.checks);
  std::vector<Flag> flags = ctx.flags();
  // structural findings for the Heisenberg-type family appear in every
  // report, whatever subset of checks was selected
  if (c.example.family == "paper_R2ns") {
    const std::vector<std::string> ids = {"lie_bracket_EF_coefficient", "nabla_E1F1_coefficient",
                                          "witness_coefficient", "splitting_tensor_sign"};
    if (!std::all_of(ids.begin(), ids.end(), [&](const auto& id) { return detail::has_flag(flags, id); })) {
      CheckContext side = make_context(c);
      run_checks(side, {"structure.splitting_tensor", "paper_example"});
      for (const auto& f : side.flags()) {
        if (std::find(ids.begin(), ids.end(), f.id) != ids.end() && !detail::has_flag(flags, f.id)) {
          flags.push_back(f);
        }
      }
    }
  }
  ctx.flags().clear();
  nullity_flags(ctx);
  flags.insert(flags.end(), ctx.flags().begin(), ctx.flags().end());
  for (auto& r : doc.checks) {
    r.max_residual = detail::finite_or_max(r.max_residual);
    r.mean_residual = detail::finite_or_max(r.mean_residual);
    for (auto& h : r.hypotheses) h.residual = detail::finite_or_max(h.residual);
  }
  for (auto& f : flags) {
    if (f.stated) f.stated = detail::finite_or_max(*f.stated);
    if (f.measured) f.measured = detail::finite_or_max(*f.measured);
  }
  doc.flags = std::move(flags);
  const bool failed =
      std::any_of(doc.checks.begin(), doc.checks.end(), [](const CheckReport& r) { return r.verdict == Verdict::kFail; });
  doc.overall = failed ? "fail" : "pass";
  return doc;
}

// ---------------------------------------------------------------------------
// Serialisation.

inline ojson to_json(const CheckReport& r) {
  ojson j;
  j["name"] = r.name;
  j["paper_ref"] = r.paper_ref;
  ojson hs = ojson::array();
  for (const auto& h : r.hypotheses) {
    ojson hj;
    hj["name"] = h.name;
    hj["met"] = h.met;
    hj["residual"] = h.residual;
    hj["tolerance"] = h.tolerance;
    hs.push_back(hj);
  }
  j["hypotheses"] = hs;
  j["samples"] = r.samples;
  j["max_residual"] = r.max_residual;
  j["mean_residual"] = r.mean_residual;
  j["tolerance"] = r.tolerance;
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

inline ojson to_json(const Flag& f) {
  ojson j;
  j["id"] = f.id;
  j["description"] = f.description;
  j["stated"] = f.stated ? ojson(*f.stated) : ojson(nullptr);
  j["measured"] = f.measured ? ojson(*f.measured) : ojson(nullptr);
  j["consistent"] = f.consistent;
  return j;
}

inline ojson to_json(const ReportDocument& d) {
  ojson j;
  j["version"] = d.version;
  j["config"] = d.config;
  ojson cs = ojson::array();
  for (const auto& c : d.checks) cs.push_back(to_json(c));
  j["checks"] = cs;
  ojson fs = ojson::array();
  for (const auto& f : d.flags) fs.push_back(to_json(f));
  j["flags"] = fs;
  j["overall"] = d.overall;
  return j;
}

namespace detail {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // keep reals recognisable as reals
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline void write_json(std::ostream& os, const ojson& j, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << inner << ojson(k).dump() << ": ";
        write_json(os, v, indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case ojson::value_t::number_float:
      os << format_real(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Fixed field order, two-space indent, reals with 17 significant digits.
inline std::string serialize(const ReportDocument& d) {
  std::ostringstream os;
  detail::write_json(os, to_json(d), 0);
  os << "\n";
  return os.str();
}

inline ReportDocument parse_report(const std::string& text) {
  const ojson j = ojson::parse(text);
  ReportDocument d;
  d.version = j.at("version").get<std::string>();
  d.config = j.at("config");
  for (const auto& c : j.at("checks")) {
    CheckReport r;
    r.name = c.at("name").get<std::string>();
    r.paper_ref = c.at("paper_ref").get<std::string>();
    for (const auto& h : c.at("hypotheses")) {
      r.hypotheses.push_back(HypothesisResult{h.at("name").get<std::string>(), h.at("met").get<bool>(),
                                              h.at("residual").get<double>(), h.at("tolerance").get<double>()});
    }
    r.samples = c.at("samples").get<int>();
    r.max_residual = c.at("max_residual").get<double>();
    r.mean_residual = c.at("mean_residual").get<double>();
    r.tolerance = c.at("tolerance").get<double>();
    r.verdict = verdict_from_name(c.at("verdict").get<std::string>());
    d.checks.push_back(std::move(r));
  }
  for (const auto& f : j.at("flags")) {
    Flag fl;
    fl.id = f.at("id").get<std::string>();
    fl.description = f.at("description").get<std::string>();
    if (!f.at("stated").is_null()) fl.stated = f.at("stated").get<double>();
    if (!f.at("measured").is_null()) fl.measured = f.at("measured").get<double>();
    fl.consistent = f.at("consistent").get<bool>();
    d.flags.push_back(std::move(fl));
  }
  d.overall = j.at("overall").get<std::string>();
  return d;
}

}  // namespace wfs
