#include "spm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace spm {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw StructuralError(path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) bad(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "must be finite");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<int>();
}

Eigen::VectorXd vector(const json& v, const std::string& path, int dim) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  if (static_cast<int>(v.size()) != dim) {
    bad(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
  }
  Eigen::VectorXd out(dim);
  for (int i = 0; i < dim; ++i) out[i] = number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::MatrixXd matrix(const json& v, const std::string& path, int dim) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) bad(path, "expected " + std::to_string(dim) + " rows");
  Eigen::MatrixXd out(dim, dim);
  for (int i = 0; i < dim; ++i) out.row(i) = vector(v[i], path + "[" + std::to_string(i) + "]", dim).transpose();
  return out;
}

// Rethrows library validation errors with the config path in front.
template <class F>
auto at_path(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const StructuralError& e) {
    bad(path, e.what());
  }
}

Polyhedron polyhedron(const json& v, const std::string& path, int dim) {
  Eigen::VectorXd lower = vector(field(v, "lower", path), join(path, "lower"), dim);
  Eigen::VectorXd upper = vector(field(v, "upper", path), join(path, "upper"), dim);
  if ((lower.array() > upper.array()).any()) bad(path, "lower exceeds upper");
  std::vector<HalfSpace> hs;
  if (v.contains("halfspaces")) {
    const json& list = v["halfspaces"];
    if (!list.is_array()) bad(join(path, "halfspaces"), "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string hp = join(path, "halfspaces") + "[" + std::to_string(k) + "]";
      hs.emplace_back(DualPoint(vector(field(list[k], "a", hp), hp + ".a", dim)), number(field(list[k], "b", hp), hp + ".b"));
    }
  }
  if (v.contains("witness")) {
    Point w(vector(v["witness"], join(path, "witness"), dim));
    return at_path(path, [&] { return Polyhedron(Box{lower, upper}, hs, w); });
  }
  return at_path(path, [&] {
    Polyhedron P = Polyhedron::box(lower, upper);
    for (const auto& h : hs) P = P.with_cut(h);
    return P;
  });
}

SelectFrom select_from(const json& map, const std::string& path) {
  if (!map.contains("select")) return SelectFrom::PT;
  const json& s = map["select"];
  if (s == "PT") return SelectFrom::PT;
  if (s == "image_midpoint") return SelectFrom::image_midpoint;
  bad(join(path, "select"), "expected \"PT\" or \"image_midpoint\"");
}

MultivaluedMap mapping(const json& v, const std::string& path, const LpSpace& space) {
  const int d = space.dim();
  const json& type = field(v, "type", path);
  if (type == "segment_contraction") {
    Point c(vector(field(v, "center", path), join(path, "center"), d));
    const double beta = number(field(v, "beta", path), join(path, "beta"));
    return at_path(path, [&] { return MultivaluedMap::segment_contraction(c, beta, select_from(v, path)); });
  }
  if (type == "projection") {
    Polyhedron K = polyhedron(field(v, "set", path), join(path, "set"), d);
    return at_path(path, [&] { return MultivaluedMap::projection(K, select_from(v, path)); });
  }
  if (type == "affine") {
    Eigen::MatrixXd M = matrix(field(v, "M", path), join(path, "M"), d);
    Point t(vector(field(v, "t", path), join(path, "t"), d));
    Point fixed(vector(field(v, "fixed_point", path), join(path, "fixed_point"), d));
    return at_path(path, [&] { return MultivaluedMap::affine(space, M, t, fixed); });
  }
  bad(join(path, "type"), "expected segment_contraction, projection or affine");
}

Bifunction bifunction(const json& v, int d) {
  const json& type = field(v, "type", "F");
  if (type == "zero") return Bifunction::zero(d);
  if (type == "convex_cost") {
    Eigen::MatrixXd Q = matrix(field(v, "Q", "F"), "F.Q", d);
    DualPoint c(vector(field(v, "c", "F"), "F.c", d));
    return at_path("F", [&] { return Bifunction::convex_cost(Q, c); });
  }
  if (type == "monotone_operator") {
    Eigen::MatrixXd A = matrix(field(v, "A", "F"), "F.A", d);
    DualPoint b(vector(field(v, "b", "F"), "F.b", d));
    return at_path("F", [&] { return Bifunction::monotone_operator(A, b); });
  }
  bad("F.type", "expected zero, convex_cost or monotone_operator");
}

Variant variant(const json& v) {
  if (v == "multivalued_PT") return Variant::multivalued_PT;
  if (v == "multivalued_direct") return Variant::multivalued_direct;
  if (v == "single_valued") return Variant::single_valued;
  if (v == "hilbert") return Variant::hilbert;
  bad("variant", "expected multivalued_PT, multivalued_direct, single_valued or hilbert");
}

SolverSettings solver(const json& v) {
  SolverSettings s;
  if (v.contains("tol")) s.tol = number(v["tol"], "solver.tol");
  if (v.contains("max_iter")) s.max_iter = integer(v["max_iter"], "solver.max_iter");
  if (v.contains("ls_shrink")) s.ls_shrink = number(v["ls_shrink"], "solver.ls_shrink");
  if (v.contains("certificate_samples")) s.certificate_samples = integer(v["certificate_samples"], "solver.certificate_samples");
  if (v.contains("seed")) {
    if (!v["seed"].is_number_unsigned()) bad("solver.seed", "expected a nonnegative integer");
    s.seed = v["seed"].get<std::uint64_t>();
  }
  at_path("solver", [&] {
    s.validate();
    return 0;
  });
  return s;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json array(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw StructuralError("failed writing '" + path + "'");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("config", "expected a JSON object");
  const int d = integer(field(doc, "dim", ""), "dim");
  if (d < 1) bad("dim", "must be positive");
  const double p = number(field(doc, "p", ""), "p");
  const LpSpace space = at_path("p", [&] { return LpSpace(d, p); });

  Polyhedron C = polyhedron(field(doc, "C", ""), "C", d);

  const json& maps_doc = field(doc, "maps", "");
  if (!maps_doc.is_array() || maps_doc.empty()) bad("maps", "expected a nonempty array");
  std::vector<MultivaluedMap> maps;
  for (std::size_t i = 0; i < maps_doc.size(); ++i) maps.push_back(mapping(maps_doc[i], "maps[" + std::to_string(i) + "]", space));

  Bifunction F = doc.contains("F") ? bifunction(doc["F"], d) : Bifunction::zero(d);

  ExperimentConfig out{AlgorithmConfig{space, std::move(C), std::move(maps), std::move(F), default_weights(static_cast<int>(maps_doc.size())),
                                       constant_r(1.0), Point(vector(field(doc, "x0", ""), "x0", d))},
                       std::nullopt, false, {}};
  AlgorithmConfig& a = out.algorithm;

  if (doc.contains("weights")) {
    const json& wd = doc["weights"];
    if (!wd.is_array()) bad("weights", "expected an array");
    std::vector<double> w;
    for (std::size_t i = 0; i < wd.size(); ++i) w.push_back(number(wd[i], "weights[" + std::to_string(i) + "]"));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (sum > 0.0 && std::abs(sum - 1.0) > 1e-12) {
      for (double& v : w) v /= sum;
      out.notices.push_back("weights: entries sum to " + g17(sum) + "; renormalized to 1");
    }
    a.weights = constant_weights(std::move(w));
  }
  if (doc.contains("r")) {
    const double r = number(doc["r"], "r");
    if (!(r > 0.0)) bad("r", "must be positive, got " + g17(r));
    a.r_schedule = constant_r(r);
  }
  if (doc.contains("stop_tol")) a.stop_tol = number(doc["stop_tol"], "stop_tol");
  if (doc.contains("max_outer")) a.max_outer = integer(doc["max_outer"], "max_outer");
  if (doc.contains("variant")) a.variant = variant(doc["variant"]);
  if (doc.contains("w_min")) a.w_min = number(doc["w_min"], "w_min");
  if (doc.contains("r_min")) a.r_min = number(doc["r_min"], "r_min");
  if (doc.contains("solver")) a.settings = solver(doc["solver"]);
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (o.contains("log_y_n")) {
      if (!o["log_y_n"].is_boolean()) bad("output.log_y_n", "expected true or false");
      out.log_y_n = o["log_y_n"].get<bool>();
    }
  }
  if (doc.contains("known_solution")) out.known_solution = Point(vector(doc["known_solution"], "known_solution", d));
  a.validate();
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot read config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw StructuralError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

TraceRecord record_of(const StepDiagnostics& s, bool log_y_n) {
  TraceRecord r{s.n, s.step_norm, s.phi_to_x0, s.phi_next_to_u, s.fix_residuals, s.ep_res, s.inner_iters, s.cut_count, {}};
  if (log_y_n) r.y.assign(s.y.coords().data(), s.y.coords().data() + s.y.dim());
  return r;
}

std::string trace_csv(const std::vector<StepDiagnostics>& trace, std::size_t maps, bool log_y_n) {
  std::ostringstream os;
  os << "n,step_norm,phi_to_x0,phi_next_to_u";
  for (std::size_t i = 1; i <= maps; ++i) os << ",fix_residual_" << i;
  os << ",ep_res,inner_iters,cut_count";
  const int d = trace.empty() ? 0 : trace.front().x.dim();
  if (log_y_n) {
    for (int i = 1; i <= d; ++i) os << ",y_" << i;
  }
  os << '\n';
  for (const auto& s : trace) {
    os << s.n << ',' << g17(s.step_norm) << ',' << g17(s.phi_to_x0) << ',' << g17(s.phi_next_to_u);
    for (double f : s.fix_residuals) os << ',' << g17(f);
    os << ',' << g17(s.ep_res) << ',' << s.inner_iters << ',' << s.cut_count;
    if (log_y_n) {
      for (int i = 0; i < d; ++i) os << ',' << g17(s.y[i]);
    }
    os << '\n';
  }
  return os.str();
}

json summary_json(const RunResult& result, const Report& checks) {
  json list = json::array();
  for (const auto& c : checks.checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}, {"detail", c.detail}});
  }
  return {{"converged", result.converged},
          {"iterations", result.trace.size()},
          {"final", array(result.final.coords())},
          {"checks_passed", checks.ok()},
          {"checks", list}};
}

json run_json(const RunResult& result, const Report& checks, bool log_y_n) {
  json rows = json::array();
  for (const auto& s : result.trace) {
    const TraceRecord r = record_of(s, log_y_n);
    json row = {{"n", r.n},
                {"step_norm", r.step_norm},
                {"phi_to_x0", r.phi_to_x0},
                {"phi_next_to_u", r.phi_next_to_u},
                {"fix_residuals", r.fix_residuals},
                {"ep_res", r.ep_res},
                {"inner_iters", r.inner_iters},
                {"cut_count", r.cut_count}};
    if (log_y_n) row["y"] = r.y;
    rows.push_back(std::move(row));
  }
  return {{"trace", std::move(rows)}, {"summary", summary_json(result, checks)}};
}

std::vector<TraceRecord> parse_trace(const json& doc) {
  std::vector<TraceRecord> out;
  const json& rows = field(doc, "trace", "");
  if (!rows.is_array()) bad("trace", "expected an array");
  for (const auto& row : rows) {
    TraceRecord r;
    r.n = row.at("n").get<int>();
    r.step_norm = row.at("step_norm").get<double>();
    r.phi_to_x0 = row.at("phi_to_x0").get<double>();
    r.phi_next_to_u = row.at("phi_next_to_u").get<double>();
    r.fix_residuals = row.at("fix_residuals").get<std::vector<double>>();
    r.ep_res = row.at("ep_res").get<double>();
    r.inner_iters = row.at("inner_iters").get<int>();
    r.cut_count = row.at("cut_count").get<std::size_t>();
    if (row.contains("y")) r.y = row["y"].get<std::vector<double>>();
    out.push_back(std::move(r));
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out_path, Format format, std::ostream& err) {
  try {
    const ExperimentConfig config = load_config(config_path);
    for (const auto& note : config.notices) err << "notice: " << note << '\n';
    const RunResult result = run(config.algorithm);
    const Report checks = verify_trace(result.trace, config.algorithm, config.known_solution, result.converged);
    if (format == Format::csv) {
      write_file(out_path, trace_csv(result.trace, config.algorithm.maps.size(), config.log_y_n));
      write_file(out_path + ".summary.json", summary_json(result, checks).dump(2) + "\n");
    } else {
      write_file(out_path, run_json(result, checks, config.log_y_n).dump(2) + "\n");
    }
    for (const auto& c : checks.checks) {
      if (!c.passed) err << "warning: trace check " << c.name << " failed: " << c.detail << '\n';
    }
    if (!result.converged) {
      err << "max_outer = " << config.algorithm.max_outer << " reached without convergence\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_check(const std::string& suite, const CheckOptions& options, std::ostream& out, std::ostream& err) {
  Report report;
  try {
    report = run_suite(suite, options);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << c.worst;
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
    if (c.passed) ++passed;
  }
  out << suite << ": " << passed << "/" << report.checks.size() << " checks passed\n";
  return report.ok() ? 0 : 1;
}

}  // namespace spm
