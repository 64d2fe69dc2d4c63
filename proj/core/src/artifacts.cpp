#include "cpce/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "cpce/errors.hpp"

namespace cpce {

namespace {

using json = nlohmann::ordered_json;

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? cols_if_empty : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw ValidationError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json basis_json(const OrthonormalBasis& b) {
  json j;
  j["dimension"] = b.dim();
  j["monomials"] = json::array();
  for (const auto& m : b.monomials) j["monomials"].push_back(m.exponents());
  j["coeffs"] = matrix_json(b.coeffs);
  j["gram_residual"] = b.gram_residual;
  j["condition"] = b.condition;
  j["scaled_condition"] = b.scaled_condition;
  return j;
}

OrthonormalBasis basis_from(const json& j) {
  OrthonormalBasis b;
  for (const auto& e : j.at("monomials")) b.monomials.emplace_back(e.get<Exponents>());
  b.coeffs = matrix_from(j.at("coeffs"));
  const auto m = static_cast<Eigen::Index>(b.monomials.size());
  if (b.coeffs.rows() != m || b.coeffs.cols() != m) {
    throw ValidationError("basis coefficient matrix does not match the monomial count");
  }
  const std::size_t d = j.at("dimension").get<std::size_t>();
  for (const auto& mono : b.monomials) {
    if (mono.dim() != d) throw ValidationError("monomial exponent vector of the wrong length");
  }
  b.gram_residual = j.at("gram_residual").get<double>();
  b.condition = j.at("condition").get<double>();
  b.scaled_condition = j.at("scaled_condition").get<double>();
  return b;
}

SolveStatus status_from(const std::string& s) {
  for (SolveStatus st : {SolveStatus::optimal, SolveStatus::infeasible, SolveStatus::numerical_failure}) {
    if (s == to_string(st)) return st;
  }
  throw ValidationError("unknown solve status '" + s + "'");
}

ConstraintId constraint_from(const std::string& s) {
  for (ConstraintId id : kAllConstraints) {
    if (s == to_string(id)) return id;
  }
  throw ValidationError("unknown constraint '" + s + "'");
}

template <class F>
auto parse_with(std::string_view text, std::string_view source, const char* kind, F&& build) {
  try {
    const json j = json::parse(text.begin(), text.end());
    if (j.value("artifact", std::string()) != kind) {
      throw ValidationError(std::string("expected a '") + kind + "' artifact");
    }
    return build(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(source) + ": malformed " + kind + " artifact: " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(source) + ": " + e.what());
  }
}

json record_json(const ConstraintRecord& r) {
  json j;
  j["constraint"] = to_string(r.id);
  j["mode"] = to_string(r.mode);
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["percentile_lo"] = r.percentile_lo;
  j["percentile_lo_se"] = r.percentile_lo_se;
  j["percentile_hi"] = r.percentile_hi;
  j["percentile_hi_se"] = r.percentile_hi_se;
  j["mean"] = r.mean;
  j["stddev"] = r.stddev;
  j["violation_rate"] = r.violation_rate;
  j["bound"] = r.bound;
  j["bound_kind"] = is_lower_bound(r.id) ? "lower" : "upper";
  return j;
}

std::string histogram_rows(const std::vector<double>& edges, const std::vector<std::size_t>& a,
                           const std::vector<std::size_t>& b, const char* header) {
  std::ostringstream out;
  out << header << "\n";
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out << number(edges[i]) << "," << number(edges[i + 1]) << "," << a[i] << "," << b[i] << "\n";
  }
  return out.str();
}

json entry_json(const ManifestEntry& e) {
  json j;
  j["stage"] = e.stage;
  j["path"] = e.path;
  j["sha256"] = e.sha256;
  j["seconds"] = e.seconds;
  return j;
}

ManifestEntry entry_from(const json& j) {
  return ManifestEntry{j.at("stage").get<std::string>(), j.at("path").get<std::string>(),
                       j.at("sha256").get<std::string>(), j.at("seconds").get<double>()};
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::internal, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError(tmp.string() + ": cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ParameterError(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string to_json(const BasisArtifact& a) {
  json j;
  j["artifact"] = "basis";
  j["scenario_sha256"] = a.scenario_sha256;
  j["k"] = a.k;
  j["size"] = a.basis.size();
  j["basis"] = basis_json(a.basis);
  j["moments"] = json::array();
  for (const auto& [e, v] : a.moments.entries()) {
    json m;
    m["exponents"] = e;
    m["value"] = v;
    j["moments"].push_back(std::move(m));
  }
  j["seconds"] = a.seconds;
  return j.dump(2) + "\n";
}

BasisArtifact parse_basis_artifact(std::string_view text, std::string_view source) {
  return parse_with(text, source, "basis", [](const json& j) {
    BasisArtifact a;
    a.scenario_sha256 = j.at("scenario_sha256").get<std::string>();
    a.k = j.at("k").get<int>();
    a.basis = basis_from(j.at("basis"));
    a.moments = MomentTable(a.basis.dim());
    for (const auto& m : j.at("moments")) {
      const auto e = m.at("exponents").get<Exponents>();
      if (e.size() != a.basis.dim()) throw ValidationError("moment exponent vector of the wrong length");
      a.moments.insert(e, m.at("value").get<double>());
    }
    a.seconds = j.at("seconds").get<double>();
    return a;
  });
}

std::string to_json(const CoefficientArtifact& a) {
  json j;
  j["artifact"] = "coefficients";
  j["scenario_sha256"] = a.scenario_sha256;
  j["basis_sha256"] = a.basis_sha256;
  j["k"] = a.k;
  j["basis"] = basis_json(a.basis);
  j["bid_ids"] = a.bid_ids;
  j["a0"] = vector_json(a.pce.a0);
  j["A"] = matrix_json(a.pce.A);
  json errors = json::array();
  for (std::size_t i = 0; i < a.expansion_errors.size(); ++i) {
    json e;
    e["bid"] = a.bid_ids.at(i);
    e["max_relative_error"] = a.expansion_errors[i];
    errors.push_back(std::move(e));
  }
  j["expansion_errors"] = std::move(errors);
  j["error_samples"] = a.error_samples;
  j["error_seed"] = a.error_seed;
  j["seconds"] = a.seconds;
  return j.dump(2) + "\n";
}

CoefficientArtifact parse_coefficient_artifact(std::string_view text, std::string_view source) {
  return parse_with(text, source, "coefficients", [](const json& j) {
    CoefficientArtifact a;
    a.scenario_sha256 = j.at("scenario_sha256").get<std::string>();
    a.basis_sha256 = j.at("basis_sha256").get<std::string>();
    a.k = j.at("k").get<int>();
    a.basis = basis_from(j.at("basis"));
    a.bid_ids = j.at("bid_ids").get<std::vector<std::string>>();
    a.pce.a0 = vector_from(j.at("a0"));
    a.pce.A = matrix_from(j.at("A"), static_cast<Eigen::Index>(a.bid_ids.size()));
    a.pce.basis_ref = a.basis_sha256;
    if (a.pce.bids() != a.bid_ids.size() || static_cast<std::size_t>(a.pce.A.cols()) != a.bid_ids.size() ||
        a.pce.basis_size() != a.basis.size()) {
      throw ValidationError("coefficient matrix dimensions do not match the bids and basis");
    }
    for (const auto& e : j.at("expansion_errors")) a.expansion_errors.push_back(e.at("max_relative_error").get<double>());
    a.error_samples = j.at("error_samples").get<std::size_t>();
    a.error_seed = j.at("error_seed").get<std::uint64_t>();
    a.seconds = j.at("seconds").get<double>();
    return a;
  });
}

std::string to_json(const SolutionArtifact& a) {
  const ProcurementSolution& s = a.solution;
  json j;
  j["artifact"] = "solution";
  j["scenario_sha256"] = a.scenario_sha256;
  j["coefficients_sha256"] = a.coefficients_sha256;
  json spec;
  spec["n_x"] = a.spec.n_x;
  spec["n_y"] = a.spec.n_y;
  spec["reserve_x"] = a.spec.reserve_x;
  spec["reserve_y"] = a.spec.reserve_y;
  spec["tie_xy"] = a.spec.tie_xy;
  spec["tie_yx"] = a.spec.tie_yx;
  spec["epsilon"] = a.spec.epsilon;
  spec["costs"] = vector_json(a.spec.costs);
  j["spec"] = std::move(spec);
  j["lambda"] = {{"lo", a.lambda.lambda_lo}, {"hi", a.lambda.lambda_hi}};
  j["status"] = to_string(s.status);
  j["message"] = s.message;
  j["objective"] = s.objective;
  j["x"] = vector_json(s.x);
  j["y"] = vector_json(s.y);
  j["residuals"] = s.residuals;
  json margins = json::array();
  for (const auto& m : a.margins) {
    json mj;
    mj["constraint"] = to_string(m.id);
    mj["mean"] = m.mean;
    mj["sigma"] = m.sigma;
    mj["quantile"] = m.quantile;
    mj["bound"] = m.bound;
    mj["margin"] = m.margin;
    mj["active"] = m.active;
    margins.push_back(std::move(mj));
  }
  j["margins"] = std::move(margins);
  json solver;
  solver["duality_gap"] = s.duality_gap;
  solver["relative_gap"] = s.relative_gap;
  solver["primal_residual"] = s.primal_residual;
  solver["stationarity_residual"] = s.stationarity_residual;
  solver["newton_steps"] = s.newton_steps;
  j["solver"] = std::move(solver);
  j["seconds"] = a.seconds;
  return j.dump(2) + "\n";
}

SolutionArtifact parse_solution_artifact(std::string_view text, std::string_view source) {
  return parse_with(text, source, "solution", [](const json& j) {
    SolutionArtifact a;
    a.scenario_sha256 = j.at("scenario_sha256").get<std::string>();
    a.coefficients_sha256 = j.at("coefficients_sha256").get<std::string>();
    const json& spec = j.at("spec");
    a.spec.n_x = spec.at("n_x").get<std::size_t>();
    a.spec.n_y = spec.at("n_y").get<std::size_t>();
    a.spec.reserve_x = spec.at("reserve_x").get<double>();
    a.spec.reserve_y = spec.at("reserve_y").get<double>();
    a.spec.tie_xy = spec.at("tie_xy").get<double>();
    a.spec.tie_yx = spec.at("tie_yx").get<double>();
    a.spec.epsilon = spec.at("epsilon").get<double>();
    a.spec.costs = vector_from(spec.at("costs"));
    a.lambda.lambda_lo = j.at("lambda").at("lo").get<double>();
    a.lambda.lambda_hi = j.at("lambda").at("hi").get<double>();
    ProcurementSolution& s = a.solution;
    s.status = status_from(j.at("status").get<std::string>());
    s.message = j.at("message").get<std::string>();
    s.objective = j.at("objective").get<double>();
    s.x = vector_from(j.at("x"));
    s.y = vector_from(j.at("y"));
    if (static_cast<std::size_t>(s.x.size()) != a.spec.bids() || s.y.size() != s.x.size()) {
      throw ValidationError("solution vectors do not match the bid count");
    }
    s.residuals = j.at("residuals").get<std::vector<double>>();
    const json& margins = j.at("margins");
    if (margins.size() != a.margins.size()) throw ValidationError("expected four constraint margins");
    for (std::size_t i = 0; i < a.margins.size(); ++i) {
      const json& mj = margins.at(i);
      ConstraintMargin& m = a.margins[i];
      m.id = constraint_from(mj.at("constraint").get<std::string>());
      m.mean = mj.at("mean").get<double>();
      m.sigma = mj.at("sigma").get<double>();
      m.quantile = mj.at("quantile").get<double>();
      m.bound = mj.at("bound").get<double>();
      m.margin = mj.at("margin").get<double>();
      m.active = mj.at("active").get<bool>();
    }
    const json& solver = j.at("solver");
    s.duality_gap = solver.at("duality_gap").get<double>();
    s.relative_gap = solver.at("relative_gap").get<double>();
    s.primal_residual = solver.at("primal_residual").get<double>();
    s.stationarity_residual = solver.at("stationarity_residual").get<double>();
    s.newton_steps = solver.at("newton_steps").get<int>();
    a.seconds = j.at("seconds").get<double>();
    return a;
  });
}

std::string validation_json(const ValidationReport& report, std::string_view scenario_sha256,
                            const ProcurementSolution& solution) {
  json j;
  j["artifact"] = "validation";
  j["scenario_sha256"] = std::string(scenario_sha256);
  j["samples"] = report.samples;
  j["seed"] = report.seed;
  j["epsilon"] = report.epsilon;
  j["quantile_estimator"] = report.quantile_estimator;
  j["x"] = vector_json(solution.x);
  j["y"] = vector_json(solution.y);
  j["records"] = json::array();
  for (const auto& r : report.records) j["records"].push_back(record_json(r));
  j["expansion"] = json::array();
  for (const auto& e : report.expansion) {
    json ej;
    ej["bid"] = e.bid_id;
    ej["max_relative_error"] = e.max_relative_error;
    ej["mean_true"] = e.mean_true;
    ej["mean_expansion"] = e.mean_expansion;
    j["expansion"].push_back(std::move(ej));
  }
  return j.dump(2) + "\n";
}

std::string validation_csv(const ValidationReport& report) {
  std::ostringstream out;
  out << "constraint,mode,samples,seed,percentile_lo,percentile_lo_se,percentile_hi,percentile_hi_se,"
         "mean,stddev,violation_rate,bound\n";
  for (const auto& r : report.records) {
    out << to_string(r.id) << "," << to_string(r.mode) << "," << r.samples << "," << r.seed << ","
        << number(r.percentile_lo) << "," << number(r.percentile_lo_se) << "," << number(r.percentile_hi) << ","
        << number(r.percentile_hi_se) << "," << number(r.mean) << "," << number(r.stddev) << ","
        << number(r.violation_rate) << "," << number(r.bound) << "\n";
  }
  return out.str();
}

std::string summary_csv(const ValidationReport& report) {
  std::ostringstream out;
  out << "constraint,bound,percentile_lo_dependent,percentile_lo_independent,percentile_hi_dependent,"
         "percentile_hi_independent,violation_dependent,violation_independent\n";
  for (ConstraintId id : kAllConstraints) {
    const auto& d = report.record(id, SamplingMode::dependent);
    const auto& i = report.record(id, SamplingMode::independent);
    out << to_string(id) << "," << number(d.bound) << "," << number(d.percentile_lo) << ","
        << number(i.percentile_lo) << "," << number(d.percentile_hi) << "," << number(i.percentile_hi) << ","
        << number(d.violation_rate) << "," << number(i.violation_rate) << "\n";
  }
  return out.str();
}

std::string expansion_histogram_csv(const ExpansionComparison& cmp) {
  return histogram_rows(cmp.edges, cmp.counts_true, cmp.counts_expansion,
                        "bin_left,bin_right,count_true,count_expansion");
}

std::string procured_histogram_csv(const ProcuredHistogram& h) {
  return histogram_rows(h.edges, h.counts_dependent, h.counts_independent,
                        "bin_left,bin_right,count_dependent,count_independent");
}

std::string to_json(const Manifest& m) {
  json j;
  j["artifact"] = "manifest";
  j["version"] = m.version;
  j["scenario"] = m.scenario;
  j["scenario_sha256"] = m.scenario_sha256;
  j["seed"] = m.seed;
  j["samples"] = m.samples;
  j["k"] = m.k;
  j["threads"] = m.threads;
  j["artifacts"] = json::array();
  for (const auto& e : m.artifacts) j["artifacts"].push_back(entry_json(e));
  j["tables"] = json::array();
  for (const auto& e : m.tables) j["tables"].push_back(entry_json(e));
  j["total_seconds"] = m.total_seconds;
  return j.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view text, std::string_view source) {
  return parse_with(text, source, "manifest", [](const json& j) {
    Manifest m;
    m.version = j.at("version").get<std::string>();
    m.scenario = j.at("scenario").get<std::string>();
    m.scenario_sha256 = j.at("scenario_sha256").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.samples = j.at("samples").get<std::size_t>();
    m.k = j.at("k").get<int>();
    m.threads = j.at("threads").get<unsigned>();
    for (const auto& e : j.at("artifacts")) m.artifacts.push_back(entry_from(e));
    for (const auto& e : j.at("tables")) m.tables.push_back(entry_from(e));
    m.total_seconds = j.at("total_seconds").get<double>();
    return m;
  });
}

}  // namespace cpce
