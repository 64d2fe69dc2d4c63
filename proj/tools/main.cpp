// cpce: command-line front end for the expansion / procurement pipeline.
//
//   cpce run      --scenario normal8.json --out runs/normal8
//   cpce basis    --scenario s.json --out basis.json
//   cpce expand   --scenario s.json --basis basis.json --out coefficients.json
//   cpce solve    --scenario s.json --coeffs coefficients.json --out solution.json
//   cpce validate --scenario s.json --coeffs coefficients.json --solution solution.json --out dir
//   cpce scenario normal8 --out normal8.json

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cpce/errors.hpp"
#include "cpce/pipeline.hpp"
#include "cpce/version.hpp"

namespace {

struct Paths {
  std::string scenario;
  std::string out;
  std::string basis;
  std::string coeffs;
  std::string solution;
  std::string name;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial chaos expansion with Gaussian copulas and chance-constrained reserve procurement"};
  app.set_version_flag("--version", std::string(cpce::kVersion));
  app.require_subcommand(1);

  cpce::RunOptions options;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<std::size_t> samples;
  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--seed", seed, "Override the validation seed")->type_name("N");
  app.add_option("--k", k, "Override the quadrature order")->type_name("N");
  app.add_option("--samples", samples, "Override the Monte-Carlo sample count")->type_name("N");
  app.add_option("--threads", threads, "Worker threads per stage")->check(CLI::Range(1u, 1024u));
  app.add_flag("--quiet", quiet, "Suppress progress output");

  Paths p;
  auto scenario_opt = [&](CLI::App* sub) {
    sub->add_option("--scenario", p.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  };
  // Global options may also be given after the subcommand name.
  auto with_globals = [&](CLI::App* sub) {
    sub->fallthrough();
    return sub;
  };

  auto* basis = with_globals(app.add_subcommand("basis", "Build the orthonormal basis"));
  scenario_opt(basis);
  basis->add_option("--out", p.out, "Basis artifact to write")->required();

  auto* expand = with_globals(app.add_subcommand("expand", "Project the bids onto a basis"));
  scenario_opt(expand);
  expand->add_option("--basis", p.basis, "Basis artifact")->required()->check(CLI::ExistingFile);
  expand->add_option("--out", p.out, "Coefficient artifact to write")->required();

  auto* solve = with_globals(app.add_subcommand("solve", "Solve the chance-constrained procurement problem"));
  scenario_opt(solve);
  solve->add_option("--coeffs", p.coeffs, "Coefficient artifact")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", p.out, "Solution report to write")->required();

  auto* validate = with_globals(app.add_subcommand("validate", "Monte-Carlo check of the solved point"));
  scenario_opt(validate);
  validate->add_option("--coeffs", p.coeffs, "Coefficient artifact")->required()->check(CLI::ExistingFile);
  validate->add_option("--solution", p.solution, "Solution report")->required()->check(CLI::ExistingFile);
  validate->add_option("--out", p.out, "Output directory")->required();

  auto* run = with_globals(app.add_subcommand("run", "Run all stages and write a manifest"));
  scenario_opt(run);
  run->add_option("--out", p.out, "Output directory")->required();

  auto* scenario = app.add_subcommand("scenario", "Print or write a built-in scenario");
  scenario->add_option("name", p.name, "normal8, beta8 or toy1d")->required();
  scenario->add_option("--out", p.out, "File to write (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  options.seed = seed;
  options.k = k;
  options.samples = samples;
  options.threads = threads;
  options.log = quiet ? nullptr : &std::cerr;

  try {
    if (*basis) {
      cpce::cmd_basis(p.scenario, p.out, options);
    } else if (*expand) {
      cpce::cmd_expand(p.scenario, p.basis, p.out, options);
    } else if (*solve) {
      cpce::cmd_solve(p.scenario, p.coeffs, p.out, options);
    } else if (*validate) {
      cpce::cmd_validate(p.scenario, p.coeffs, p.solution, p.out, options);
    } else if (*run) {
      cpce::cmd_run(p.scenario, p.out, options);
    } else if (*scenario) {
      const std::string text = cpce::to_json(cpce::canonical_scenario(p.name));
      if (p.out.empty()) {
        std::cout << text;
      } else {
        cpce::write_text_file(p.out, text);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "cpce: error: " << e.what() << "\n";
    return cpce::exit_code_for(e);
  }
  return 0;
}
