// wedgelab: runs the verification suites and writes JSON reports.
// Exit status: 0 all checks pass, 1 a check failed, 2 bad input.

#include "wedgelab/suites.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

using namespace wedgelab;

namespace {

struct Globals {
  std::optional<double> tol_geo, tol_op;
  std::string out_dir;
  std::string config_file;
  bool json_stdout = false;
};

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InputError("cannot write " + p.string());
  os << text;
}

int emit(const Globals& g, const SuiteReport& rep, const std::string& csv = {}) {
  const std::string text = rep.to_json().dump(2) + "\n";
  if (!g.out_dir.empty()) {
    std::filesystem::create_directories(g.out_dir);
    write_file(std::filesystem::path(g.out_dir) / (rep.suite + "_report.json"), text);
    if (!csv.empty()) write_file(std::filesystem::path(g.out_dir) / "spectrum.csv", csv);
  }
  if (g.json_stdout) {
    std::cout << text;
  } else {
    for (const auto& c : rep.checks) {
      std::cout << (c.status == "pass" ? "pass " : c.status == "fail" ? "FAIL " : "skip ") << c.check
                << "  residual=" << c.residual << "  tol=" << c.tolerance;
      if (!c.witness.empty()) std::cout << "  [" << c.witness << "]";
      std::cout << '\n';
    }
    std::cout << rep.suite << ": " << (rep.passed() ? "passed" : "FAILED") << '\n';
  }
  return rep.passed() ? 0 : 1;
}

RunConfig base_config(const Globals& g) {
  RunConfig cfg;
  if (!g.config_file.empty()) cfg = run_config_from_json(read_json_file(g.config_file));
  if (g.tol_geo) cfg.tol_geo = g.tol_geo;
  if (g.tol_op) cfg.tol_op = g.tol_op;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wedge geometry, modular theory and conjugation-net verification suites"};
  app.require_subcommand(1);
  Globals g;
  auto* tg = app.add_option("--tol-geo", g.tol_geo, "Threshold for geometric checks");
  auto* to = app.add_option("--tol-op", g.tol_op, "Threshold for operator checks");
  app.add_option("--out", g.out_dir, "Directory for report and spectrum files");
  app.add_flag("--json", g.json_stdout, "Print the JSON report on stdout");
  app.add_option("--config", g.config_file, "JSON run configuration");
  tg->check(CLI::NonNegativeNumber);
  to->check(CLI::NonNegativeNumber);

  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  auto* geometry = app.add_subcommand("geometry", "Wedge geometry suites")->require_subcommand(1);
  geometry->fallthrough();
  auto* geometry_verify = geometry->add_subcommand("verify", "Reflection, decomposition and identification checks");
  geometry_verify->fallthrough();
  geometry_verify->add_option("--samples", samples, "Number of random samples")->check(CLI::PositiveNumber);
  geometry_verify->add_option("--seed", seed, "Random seed");

  std::string poincare_file;
  auto* decompose = app.add_subcommand("decompose", "Reflection word of a Poincare element");
  decompose->fallthrough();
  decompose->add_option("--poincare", poincare_file, "JSON file {lambda, a}")->required();

  std::string algebra_file, vector_file;
  auto* tomita = app.add_subcommand("tomita", "Modular theory")->require_subcommand(1);
  tomita->fallthrough();
  auto* tomita_compute = tomita->add_subcommand("compute", "Modular data of an algebra and a vector");
  tomita_compute->fallthrough();
  tomita_compute->add_option("--algebra", algebra_file, "JSON list of generating matrices")->required();
  tomita_compute->add_option("--vector", vector_file, "JSON complex vector")->required();

  std::optional<double> mass, spacing;
  std::optional<int> grid;
  std::string sabotage;
  auto* model = app.add_subcommand("model", "Grid model of the free scalar field")->require_subcommand(1);
  model->fallthrough();
  auto* model_verify = model->add_subcommand("verify", "Translations, spectrum, stability and net conditions");
  model_verify->fallthrough();
  model_verify->add_option("--mass", mass, "Particle mass");
  model_verify->add_option("--grid", grid, "Grid half-size K (2K+1 rapidities)");
  model_verify->add_option("--spacing", spacing, "Rapidity spacing h");
  model_verify->add_option("--sabotage", sabotage, "duplicate-conjugation, non-involutive or wrong-wedge");
  model_verify->add_option("--seed", seed, "Random seed");

  std::string fixture_file;
  auto* cgma = app.add_subcommand("cgma", "Conjugation net conditions")->require_subcommand(1);
  cgma->fallthrough();
  auto* cgma_check = cgma->add_subcommand("check", "Check conditions (a)-(d) on a fixture");
  cgma_check->fallthrough();
  cgma_check->add_option("--fixture", fixture_file, "JSON net fixture")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = base_config(g);
    if (seed) cfg.seed = *seed;

    if (geometry_verify->parsed()) {
      if (samples) cfg.samples = *samples;
      return emit(g, geometry_suite(cfg));
    }
    if (decompose->parsed()) return emit(g, decompose_report(poincare_from_json(read_json_file(poincare_file)), cfg));
    if (tomita_compute->parsed()) {
      const auto a = algebra_from_json(read_json_file(algebra_file));
      const auto omega = vector_from_json(read_json_file(vector_file));
      if (omega.size() != a.dim()) throw InputError("vector dimension does not match the algebra");
      try {
        return emit(g, tomita_compute_report(a, omega, cfg));
      } catch (const ModularError& e) {
        std::cerr << "tomita: " << e.what() << '\n';
        return 1;
      }
    }
    if (model_verify->parsed()) {
      if (mass) cfg.mass = *mass;
      if (grid) cfg.K = *grid;
      if (spacing) cfg.h = *spacing;
      if (!sabotage.empty()) {
        const auto s = parse_sabotage(sabotage);
        if (!s) throw InputError("unknown sabotage '" + sabotage + "'");
        cfg.sabotage = *s;
      }
      RapidityGrid(cfg.mass, cfg.K, cfg.h);  // validates before any work
      const auto run = model_suite(cfg);
      return emit(g, run.report, run.spectrum_csv);
    }
    if (cgma_check->parsed()) return emit(g, cgma_suite(fixture_from_json(read_json_file(fixture_file)), cfg));
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ModularError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
