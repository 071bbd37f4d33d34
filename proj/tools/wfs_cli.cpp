// Command-line front end: validate, classify, check, nullity-fit, suite.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wfs/report.hpp"

namespace {

using namespace wfs;

struct ExampleOptions {
  std::string family = "paper_R2ns";
  int n = 1;
  int s = 1;
  double beta = 1.0;
  int samples = 50;
  std::uint64_t seed = RunConfig{}.seed;
  std::vector<std::string> tols;
};

void add_example_options(CLI::App* app, ExampleOptions& o) {
  app->add_option("--example", o.family, "example family (paper_R2ns | unit_tangent_flat)");
  app->add_option("--n", o.n, "n");
  app->add_option("--s", o.s, "number of Reeb fields");
  app->add_option("--beta", o.beta, "beta (paper_R2ns)");
  app->add_option("--samples", o.samples, "sample points");
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--tol", o.tols, "tolerance override NAME=VAL (check name or class)");
}

SuiteConfig to_config(const ExampleOptions& o, std::vector<std::string> checks) {
  SuiteConfig c;
  c.example = ExampleConfig{o.family, o.n, o.s, o.beta};
  c.run.samples = o.samples;
  c.run.seed = o.seed;
  c.run.checks = std::move(checks);
  for (const auto& t : o.tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--tol expects NAME=VAL, got '" + t + "'");
    double v = 0.0;
    try {
      size_t used = 0;
      v = std::stod(t.substr(eq + 1), &used);
      if (used != t.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("--tol value is not a number: '" + t + "'");
    }
    c.run.tolerances.set(t.substr(0, eq), v);
  }
  validate(c);
  return c;
}

void print_table(const ReportDocument& d) {
  for (const auto& r : d.checks) {
    std::printf("%-42s %-26s samples=%-4d max=%.3e tol=%.1e\n", r.name.c_str(), verdict_name(r.verdict).c_str(),
                r.samples, r.max_residual, r.tolerance);
  }
  for (const auto& f : d.flags) {
    std::printf("flag %-36s stated=%-24s measured=%-24s %s\n", f.id.c_str(),
                f.stated ? detail::format_real(*f.stated).c_str() : "null",
                f.measured ? detail::format_real(*f.measured).c_str() : "null",
                f.consistent ? "consistent" : "inconsistent");
  }
  std::printf("overall: %s\n", d.overall.c_str());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

int exit_code(const ReportDocument& d) { return d.overall == "pass" ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual checks for weak metric f-structures"};
  app.require_subcommand(1);

  ExampleOptions vopt, copt, kopt, nopt;
  std::string out_path;

  auto* validate_cmd = app.add_subcommand("validate", "check the structure axioms of an example");
  add_example_options(validate_cmd, vopt);

  auto* classify_cmd = app.add_subcommand("classify", "weak almost K / C / S, normality, Killing Reeb fields");
  add_example_options(classify_cmd, copt);

  std::vector<std::string> names;
  auto* check_cmd = app.add_subcommand("check", "run named checks, groups or all");
  check_cmd->add_option("names", names, "check names, group names or 'all'")->required();
  add_example_options(check_cmd, kopt);
  check_cmd->add_option("--out", out_path, "write the JSON report here");

  auto* nullity_cmd = app.add_subcommand("nullity-fit", "least-squares (kappa, mu) fit");
  add_example_options(nullity_cmd, nopt);

  std::string config_path;
  auto* suite_cmd = app.add_subcommand("suite", "run a JSON configuration and write the report");
  suite_cmd->add_option("--config", config_path, "flat JSON config")->required();
  suite_cmd->add_option("--out", out_path, "report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (validate_cmd->parsed()) {
      const ReportDocument d = run_suite(to_config(vopt, {"axioms"}));
      print_table(d);
      return exit_code(d);
    }
    if (classify_cmd->parsed()) {
      CheckContext ctx = make_context(to_config(copt, {"all"}));
      const Taxonomy t = classify(ctx);
      for (const auto& e : t.entries) {
        std::printf("%-18s %-5s residual=%.3e\n", e.name.c_str(), e.holds ? "yes" : "no", e.residual);
      }
      return 0;
    }
    if (check_cmd->parsed()) {
      const ReportDocument d = run_suite(to_config(kopt, names));
      print_table(d);
      if (!out_path.empty()) write_file(out_path, serialize(d));
      return exit_code(d);
    }
    if (nullity_cmd->parsed()) {
      CheckContext ctx = make_context(to_config(nopt, {"all"}));
      const NullityFits& fits = ctx.nullity();
      auto show = [](const std::string& label, const NullityFit& f) {
        std::printf("%-8s kappa=%s mu=%s residual=%.3e\n", label.c_str(), detail::format_real(f.kappa).c_str(),
                    f.mu_identifiable ? detail::format_real(f.mu).c_str() : "unidentifiable", f.residual);
      };
      show("joint", fits.joint);
      for (size_t i = 0; i < fits.per_reeb.size(); ++i) show("xi" + std::to_string(i + 1), fits.per_reeb[i]);
      return 0;
    }
    if (suite_cmd->parsed()) {
      const ReportDocument d = run_suite(load_config(config_path));
      write_file(out_path, serialize(d));
      std::printf("%zu checks, overall %s, report written to %s\n", d.checks.size(), d.overall.c_str(),
                  out_path.c_str());
      return exit_code(d);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const StructureInvalid& e) {
    std::fprintf(stderr, "invalid structure: %s\n", e.what());
    return 2;
  }
  return 2;
}
