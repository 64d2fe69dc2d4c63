#include "cpce/pipeline.hpp"

#include <chrono>
#include <filesystem>

#include "cpce/errors.hpp"
#include "cpce/version.hpp"

namespace cpce {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void log_line(const RunOptions& options, const std::string& line) {
  if (options.log) *options.log << line << std::endl;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

StageOutput write_stage(const fs::path& out, const std::string& text, double seconds) {
  write_text_file(out, text);
  return StageOutput{out, sha256_hex(text), seconds};
}

void require_same(const std::string& expected, const std::string& actual, const std::string& what) {
  if (expected != actual) {
    throw ValidationError(what + " (expected sha256 " + expected + ", found " + actual + ")");
  }
}

std::string safe_file_stem(const std::string& id) {
  std::string out;
  for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out;
}

}  // namespace

Scenario load_scenario(const fs::path& path, const RunOptions& options) {
  Scenario s = load_scenario(path);
  if (options.k) {
    if (*options.k < 1 || *options.k > kMaxRuleOrder) {
      throw ParameterError("--k must lie in [1, " + std::to_string(kMaxRuleOrder) + "]");
    }
    s.quadrature.k = *options.k;
  }
  if (options.samples) {
    if (*options.samples == 0) throw ParameterError("--samples must be positive");
    s.validation.samples = *options.samples;
  }
  if (options.seed) s.validation.seed = *options.seed;
  return s;
}

StageOutput cmd_basis(const fs::path& scenario_path, const fs::path& out, const RunOptions& options) {
  const Scenario s = load_scenario(scenario_path, options);
  const std::string scenario_sha = sha256_file(scenario_path);
  Stopwatch clock;

  const JointModel model = s.model();
  BasisArtifact a;
  a.scenario_sha256 = scenario_sha;
  a.k = s.quadrature_order();
  auto set = generate_monomials(s.dimension, s.monomials.max_degree, s.filter());
  a.moments = moment_table(set, model, a.k, s.integration(options.threads));
  const Eigen::MatrixXd gram = gram_matrix(set, a.moments);
  a.basis = orthonormalize(gram, std::move(set));
  a.seconds = clock.seconds();

  log_line(options, "basis: " + std::to_string(a.basis.size()) + " monomials, k=" + std::to_string(a.k) +
                        ", residual " + sci(a.basis.gram_residual) + ", " + seconds_text(a.seconds));
  return write_stage(out, to_json(a), a.seconds);
}

StageOutput cmd_expand(const fs::path& scenario_path, const fs::path& basis_path, const fs::path& out,
                       const RunOptions& options) {
  const Scenario s = load_scenario(scenario_path, options);
  const std::string scenario_sha = sha256_file(scenario_path);
  const std::string basis_text = read_text_file(basis_path);
  BasisArtifact basis = parse_basis_artifact(basis_text, basis_path.string());
  require_same(scenario_sha, basis.scenario_sha256, "basis artifact was built from a different scenario");
  if (basis.basis.dim() != s.dimension) throw ValidationError("basis dimension differs from the scenario");
  Stopwatch clock;

  const JointModel model = s.model();
  CoefficientArtifact a;
  a.scenario_sha256 = scenario_sha;
  a.basis_sha256 = sha256_hex(basis_text);
  a.k = options.k ? *options.k : basis.k;
  ExpandOptions expand_options;
  expand_options.integration = s.integration(options.threads);
  std::vector<Eigen::VectorXd> columns;
  for (const auto& bid : s.bids) {
    a.bid_ids.push_back(bid.id());
    columns.push_back(expand(bid, basis.basis, model, a.k, expand_options, &basis.moments));
  }
  a.pce = make_pce_matrix(columns, a.basis_sha256);

  a.error_samples = s.validation.samples;
  a.error_seed = s.validation.seed;
  const RowMatrix samples = sample(model, a.error_samples, a.error_seed, SampleOptions{options.threads});
  for (std::size_t j = 0; j < s.bids.size(); ++j) {
    a.expansion_errors.push_back(expansion_error(s.bids[j], columns[j], basis.basis, samples));
  }
  a.basis = std::move(basis.basis);
  a.seconds = clock.seconds();

  double worst = 0.0;
  for (double e : a.expansion_errors) worst = std::max(worst, e);
  log_line(options, "expand: " + std::to_string(s.bids.size()) + " bids, max relative error " +
                        sci(worst) + ", " + seconds_text(a.seconds));
  return write_stage(out, to_json(a), a.seconds);
}

StageOutput cmd_solve(const fs::path& scenario_path, const fs::path& coefficients_path, const fs::path& out,
                      const RunOptions& options) {
  const Scenario s = load_scenario(scenario_path, options);
  const std::string scenario_sha = sha256_file(scenario_path);
  const std::string coeff_text = read_text_file(coefficients_path);
  const CoefficientArtifact coeffs = parse_coefficient_artifact(coeff_text, coefficients_path.string());
  require_same(scenario_sha, coeffs.scenario_sha256, "coefficient artifact was built from a different scenario");
  if (coeffs.pce.bids() != s.bids.size()) throw ValidationError("coefficient artifact has the wrong bid count");
  Stopwatch clock;

  SolutionArtifact a;
  a.scenario_sha256 = scenario_sha;
  a.coefficients_sha256 = sha256_hex(coeff_text);
  a.spec = s.procurement;
  a.lambda = QuantilePair::from_epsilon(a.spec.epsilon);
  a.solution = solve_procurement(a.spec, coeffs.pce, a.lambda);
  if (a.solution.status == SolveStatus::optimal) {
    a.margins = analytic_quantile_check(a.solution, coeffs.pce, a.spec, a.lambda);
  } else {
    for (std::size_t i = 0; i < a.margins.size(); ++i) a.margins[i].id = kAllConstraints[i];
  }
  a.seconds = clock.seconds();
  const StageOutput result = write_stage(out, to_json(a), a.seconds);

  if (a.solution.status != SolveStatus::optimal) {
    throw NumericalError(std::string("procurement solve ended with status ") + to_string(a.solution.status) +
                         ": " + a.solution.message);
  }
  std::string active;
  for (const auto& m : a.margins) {
    if (m.active) active += std::string(active.empty() ? "" : ", ") + to_string(m.id);
  }
  log_line(options, "solve: optimal, objective " + sci(a.solution.objective) + ", active [" + active +
                        "], " + seconds_text(a.seconds));
  return result;
}

ValidateOutput cmd_validate(const fs::path& scenario_path, const fs::path& coefficients_path,
                            const fs::path& solution_path, const fs::path& out_dir, const RunOptions& options) {
  const Scenario s = load_scenario(scenario_path, options);
  const std::string scenario_sha = sha256_file(scenario_path);
  const std::string coeff_text = read_text_file(coefficients_path);
  const CoefficientArtifact coeffs = parse_coefficient_artifact(coeff_text, coefficients_path.string());
  const SolutionArtifact solution =
      parse_solution_artifact(read_text_file(solution_path), solution_path.string());
  require_same(scenario_sha, coeffs.scenario_sha256, "coefficient artifact was built from a different scenario");
  require_same(scenario_sha, solution.scenario_sha256, "solution was computed for a different scenario");
  require_same(solution.coefficients_sha256, sha256_hex(coeff_text),
               "solution was computed from a different coefficient artifact");
  if (solution.solution.status != SolveStatus::optimal) {
    throw NumericalError("cannot validate a non-optimal solution");
  }
  Stopwatch clock;

  const JointModel model = s.model();
  const std::size_t n = s.validation.samples;
  const std::uint64_t seed = s.validation.seed;
  ValidateOptions vopt;
  vopt.bins = s.validation.bins;
  vopt.threads = options.threads;
  ValidationReport report = validate(solution.solution, s.bids, model, s.procurement, n, seed, vopt);
  const auto comparisons = compare_expansion(s.bids, coeffs.pce, coeffs.basis, model, n, seed,
                                             s.validation.bins, options.threads);
  for (const auto& c : comparisons) {
    report.expansion.push_back(ExpansionSummary{c.bid_id, c.max_relative_error, c.mean_true, c.mean_expansion});
  }

  ValidateOutput out;
  const std::string report_text = validation_json(report, scenario_sha, solution.solution);
  auto table = [&](const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    out.tables.push_back(ManifestEntry{"validate", name, sha256_hex(text), 0.0});
  };
  table("validation.csv", validation_csv(report));
  table("summary.csv", summary_csv(report));
  for (const auto& c : comparisons) table("hist_bid_" + safe_file_stem(c.bid_id) + ".csv", expansion_histogram_csv(c));
  for (const auto& h : report.histograms) table(std::string("hist_") + to_string(h.id) + ".csv", procured_histogram_csv(h));
  const double seconds = clock.seconds();
  out.report = write_stage(out_dir / "validation.json", report_text, seconds);

  const auto& rx = report.record(ConstraintId::reserve_x, SamplingMode::dependent);
  log_line(options, "validate: n=" + std::to_string(n) + ", reserve_x violation " +
                        sci(rx.violation_rate) + " (dependent), " + seconds_text(seconds));
  return out;
}

Manifest cmd_run(const fs::path& scenario_path, const fs::path& out_dir, const RunOptions& options) {
  const Scenario s = load_scenario(scenario_path, options);  // fail before touching out_dir
  Stopwatch clock;
  fs::create_directories(out_dir);

  Manifest m;
  m.version = kVersion;
  m.scenario = s.name;
  m.scenario_sha256 = sha256_file(scenario_path);
  m.seed = s.validation.seed;
  m.samples = s.validation.samples;
  m.k = s.quadrature_order();
  m.threads = options.threads;

  auto record = [&](const char* stage, const StageOutput& o) {
    m.artifacts.push_back(ManifestEntry{stage, o.path.filename().string(), o.sha256, o.seconds});
  };
  const StageOutput basis = cmd_basis(scenario_path, out_dir / "basis.json", options);
  record("basis", basis);
  const StageOutput coeffs = cmd_expand(scenario_path, basis.path, out_dir / "coefficients.json", options);
  record("expand", coeffs);
  const StageOutput solution = cmd_solve(scenario_path, coeffs.path, out_dir / "solution.json", options);
  record("solve", solution);
  ValidateOutput validation = cmd_validate(scenario_path, coeffs.path, solution.path, out_dir, options);
  record("validate", validation.report);
  m.tables = std::move(validation.tables);
  m.total_seconds = clock.seconds();

  write_text_file(out_dir / "manifest.json", to_json(m));
  log_line(options, "run: wrote " + (out_dir / "manifest.json").string() + ", " + seconds_text(m.total_seconds));
  return m;
}

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::domain:
      case ErrorKind::parameter:
      case ErrorKind::validation:
      case ErrorKind::configuration: return 2;
      case ErrorKind::resource: return 3;
      case ErrorKind::numerical:
      case ErrorKind::evaluation:
      case ErrorKind::internal: return 1;
    }
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 2;
  return 1;
}

}  // namespace cpce
