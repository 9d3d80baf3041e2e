#include "g2pinch/report.hpp"

#include "g2pinch/curvature.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/solitonlab.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace g2pinch {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json params_json(const ParamMap& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

double read_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(what + " must be finite");
  return d;
}

int read_index(const json& entry, const char* key) {
  if (!entry.contains(key) || !entry[key].is_number_integer())
    throw ValidationError(std::string("bracket entry needs integer '") + key + "'");
  const int v = entry[key].get<int>();
  if (v < 1 || v > kDim) throw ValidationError(std::string("index '") + key + "' must lie in 1..7");
  return v - 1;
}

template <typename Matrix>
Matrix read_matrix(const json& rows, int n, bool complex_entries) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ValidationError("almost_abelian matrix must have " + std::to_string(n) + " rows");
  Matrix m = Matrix::Zero();
  for (int r = 0; r < n; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
      throw ValidationError("almost_abelian matrix must have " + std::to_string(n) + " columns");
    for (int c = 0; c < n; ++c) {
      const json& e = rows[r][c];
      if constexpr (std::is_same_v<typename Matrix::Scalar, std::complex<double>>) {
        if (complex_entries && e.is_object()) {
          const double re = e.contains("re") ? read_number(e["re"], "re") : 0.0;
          const double im = e.contains("im") ? read_number(e["im"], "im") : 0.0;
          m(r, c) = {re, im};
          continue;
        }
      }
      m(r, c) = read_number(e, "matrix entry");
    }
  }
  return m;
}

// A user bracket that happens to be of the form mu_A gets the exact almost-abelian treatment.
std::optional<AlmostAbelianSpec> detect_almost_abelian(const LieBracket& mu) {
  const AlmostAbelianSpec spec = AlmostAbelianSpec::from_real(extract_almost_abelian(mu));
  const LieBracket back = mu_from_matrix(spec);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        if (back(i, j, k) != mu(i, j, k)) return std::nullopt;
  return spec;
}

json spectral_json(const SpectralType& s) {
  return {{"imaginary_type", s.imaginary_type}, {"real_type", s.real_type},
          {"nilpotent", s.nilpotent},           {"borderline", s.borderline},
          {"method", s.exact ? "exact" : "sampled"}};
}

}  // namespace

StructureInput parse_structure_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("structure input must be a JSON object");
  StructureInput in;
  in.echo = doc;
  if (doc.contains("almost_abelian")) {
    const json& aa = doc["almost_abelian"];
    if (aa.contains("complex"))
      in.spec = AlmostAbelianSpec::from_complex(read_matrix<CMat3>(aa["complex"], 3, true));
    else if (aa.contains("real6"))
      in.spec = AlmostAbelianSpec::from_real(read_matrix<Mat6>(aa["real6"], 6, false));
    else
      throw ValidationError("almost_abelian needs 'complex' or 'real6'");
    in.mu = mu_from_matrix(*in.spec);
    return in;
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<int>() != kDim)
    throw ValidationError("structure input needs \"dim\": 7");
  if (!doc.contains("brackets") || !doc["brackets"].is_array())
    throw ValidationError("structure input needs a \"brackets\" array");
  for (const json& e : doc["brackets"]) {
    if (!e.is_object()) throw ValidationError("bracket entries must be objects");
    const int i = read_index(e, "i"), j = read_index(e, "j"), k = read_index(e, "k");
    if (i >= j) throw ValidationError("bracket entries need i < j");
    if (!e.contains("c")) throw ValidationError("bracket entry needs 'c'");
    in.mu.set(i, j, k, in.mu(i, j, k) + read_number(e["c"], "c"));
  }
  const double jac = jacobi_residual(in.mu);
  if (jac > 1e-9 * std::max(1.0, in.mu.norm2())) {
    std::ostringstream s;
    s << "not a Lie bracket: Jacobi residual " << jac;
    throw ValidationError(s.str());
  }
  in.spec = detect_almost_abelian(in.mu);
  return in;
}

StructureInput structure_from_family(const std::string& family, const ParamMap& params) {
  const CatalogEntry e = catalog(family, params);
  StructureInput in;
  in.mu = e.mu;
  in.spec = e.spec;
  in.echo = {{"family", family}, {"params", params_json(params)}};
  return in;
}

ParamMap parse_params(const std::string& text) {
  ParamMap out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("parameter must look like k=v: " + item);
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      out[key] = std::stod(val, &used);
      if (used != val.size()) throw ValidationError("bad number for " + key + ": " + val);
    } catch (const std::logic_error&) {
      throw ValidationError("bad number for " + key + ": " + val);
    }
  }
  return out;
}

json analysis_report(const StructureInput& in, const ReportOptions& options) {
  const double tol = options.tol;
  const LieBracket& mu = in.mu;
  const double mu2 = mu.norm2();
  const G2Structure g = G2Structure::standard(mu);

  json rep;
  rep["schema"] = kReportSchema;
  rep["input"] = in.echo;
  rep["tolerances"] = {{"tol", tol},
                       {"soliton_residual", 1e-8},
                       {"steady_c", 1e-8},
                       {"dual_route_ricci", 1e-9},
                       {"dual_route_F", 1e-8},
                       {"seed", options.seed}};

  const StructureFlags sf = structure_flags(mu, tol);
  rep["structure"] = {{"solvable", sf.solvable},
                      {"nilpotent", sf.nilpotent},
                      {"unimodular", sf.unimodular},
                      {"derived_dims", sf.derived_dims},
                      {"lower_central_dims", sf.lower_central_dims},
                      {"jacobi_residual", number(jacobi_residual(mu))},
                      {"almost_abelian", in.spec.has_value()}};

  const TorsionTwoForm tt = torsion_two_form(g, true, tol);
  const KForm dpsi = ce_differential(mu, standard_psi());
  const double scale = std::max(std::sqrt(mu2), 1e-300);
  const bool torsion_free = tt.closed && dpsi.norm() <= tol * scale;
  rep["closed"] = tt.closed;
  rep["torsion_free"] = torsion_free;
  rep["closedness_defect"] = number(closedness_defect(g));
  rep["coclosedness_defect"] = number(dpsi.norm() / scale);

  if (in.spec) {
    // Throws on a decisive disagreement with the differentials.
    const ClosednessFlags cf = closedness_criterion(*in.spec, tol);
    rep["matrix_criterion"] = {{"sl3c", cf.closed}, {"su3", cf.torsion_free}};
  }

  const PinchReport pin = pinching_F(mu, tol);
  Eigen::SelfAdjointEigenSolver<Mat7> eig(pin.ricci.ric);
  std::vector<double> ric_eigs(eig.eigenvalues().data(), eig.eigenvalues().data() + kDim);
  rep["scal"] = number(pin.ricci.scal);
  rep["ricci_trace"] = number(pin.ricci.ric.trace());
  rep["ricci_eigenvalues"] = ric_eigs;
  rep["ric_norm2"] = number(pin.ricci.ric_norm2);
  rep["riemann_norm"] = number(pin.riemann_norm);
  rep["flat"] = pin.flat;
  rep["F"] = number(pin.F);

  const double tau2 = tt.closed ? tt.tau.norm2() : std::numeric_limits<double>::quiet_NaN();
  rep["tau_norm2"] = number(tau2);
  if (tt.closed && std::abs(pin.ricci.scal + 0.5 * tau2) > 1e-9 * std::max(1.0, mu2))
    throw InconsistencyError("closed structure violates scal = -|tau|^2 / 2");

  json formula = nullptr;
  if (in.spec) {
    try {
      const double f = F_almost_abelian(*in.spec, tol);
      formula = f;
      if (pin.F && std::abs(*pin.F - f) > 1e-8 * std::abs(f))
        throw InconsistencyError("F from curvature disagrees with the matrix formula");
    } catch (const ValidationError&) {
    }
    rep["F_riemannian_bound"] = nullptr;
    try {
      rep["F_riemannian_bound"] = number(F_riemannian_bound(in.spec->real()));
    } catch (const ValidationError&) {
    }
  }
  rep["F_formula"] = formula;

  const TorsionTuple tf = torsion_forms(g);
  rep["torsion_forms"] = {{"tau0", number(tf.tau0)},
                          {"tau1_norm", number(tf.tau1.norm())},
                          {"tau2_norm", number(tf.tau2.norm())},
                          {"tau3_norm", number(tf.tau3.norm())},
                          {"dphi_residual", number(tf.dphi_residual)},
                          {"dpsi_residual", number(tf.dpsi_residual)}};

  const EigenformFit ef = eigenform_fit(g);
  rep["eigenform"] = {{"c", number(ef.c)}, {"residual", number(ef.residual)}};

  const RicciSolitonFit rs = ricci_soliton_residual(mu);
  rep["ricci_soliton"] = {{"c", number(rs.c)},
                          {"residual", number(rs.residual)},
                          {"condition_number", number(rs.condition_number)},
                          {"rank_deficient", rs.rank_deficient}};
  const double einstein = einstein_residual(mu);
  rep["einstein_residual"] = number(einstein);

  DelegatedFlags delegated;
  delegated.einstein = einstein <= 1e-8;
  delegated.ricci_soliton = rs.residual <= 1e-8;

  rep["laplacian_soliton"] = nullptr;
  rep["erp"] = nullptr;
  if (tt.closed) {
    const SolitonFit fit = laplacian_soliton_fit(g);
    delegated.laplacian_soliton = fit.residual <= 1e-8;
    rep["laplacian_soliton"] = {
        {"c", number(fit.c)},
        {"c_normalized", number(fit.c_normalized)},
        {"residual", number(fit.residual)},
        {"kind", to_string(fit.kind)},
        {"condition_number", number(fit.condition_number)},
        {"rank_deficient", fit.rank_deficient},
        {"c_identifiable", fit.c_identifiable},
        {"note", "only derivation-generated fields are searched; a positive residual means "
                 "'not an algebraic soliton', not 'not a soliton'"}};
    const ErpResult erp = erp_residual(g, tol);
    rep["erp"] = {{"trivially_satisfied", erp.trivially_satisfied}, {"residual", number(erp.residual)}};
  }

  rep["classes"] = classify(g, delegated, tol).names();
  rep["spectral_type"] = in.spec ? spectral_json(spectral_type(*in.spec))
                                 : spectral_json(spectral_type_sampled(mu, 64, options.seed));
  return rep;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string csv_number(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

namespace {

std::string join_classes(const ClassFlags& c) {
  std::string out;
  for (const auto& n : c.names()) out += (out.empty() ? "" : ";") + n;
  return out;
}

}  // namespace

void write_scan_csv(std::ostream& os, const ScanResult& r) {
  std::vector<std::string> names;
  if (!r.rows.empty())
    for (const auto& [k, v] : r.rows.front().params) names.push_back(k);
  for (const auto& n : names) os << csv_field("param:" + n) << ',';
  os << "F,scal,tau_norm2,class_flags,lap_soliton_residual,lap_soliton_c,erp_residual\r\n";
  for (const auto& row : r.rows) {
    for (const auto& n : names) os << csv_number(row.params.at(n)) << ',';
    if (!row.error.empty()) {
      os << ",,,,,,\r\n";
      continue;
    }
    os << csv_number(row.F) << ',' << csv_number(row.scal) << ',' << csv_number(row.tau_norm2) << ','
       << csv_field(join_classes(row.classes)) << ',' << csv_number(row.lap_soliton_residual) << ','
       << csv_number(row.lap_soliton_c) << ',' << csv_number(row.erp_residual) << "\r\n";
  }
}

void write_flow_csv(std::ostream& os, const FlowResult& r) {
  os << "t,F,tau_norm2,dt\r\n";
  for (const auto& s : r.samples)
    os << csv_number(s.t) << ',' << csv_number(s.F) << ',' << csv_number(s.tau_norm2) << ','
       << csv_number(s.dt) << "\r\n";
}

void write_extremize_csv(std::ostream& os, const ExtremizeResult& r) {
  os << "iteration,F\r\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) os << i << ',' << csv_number(r.trace[i]) << "\r\n";
}

json scan_json(const std::string& family, const ScanResult& r, double tol) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j = {{"params", params_json(row.params)},
              {"F", number(row.F)},
              {"reference_F", number(row.reference_F)},
              {"scal", number(row.scal)},
              {"tau_norm2", number(row.tau_norm2)},
              {"closed", row.closed},
              {"classes", row.classes.names()},
              {"lap_soliton_residual", number(row.lap_soliton_residual)},
              {"lap_soliton_c", number(row.lap_soliton_c)},
              {"erp_residual", number(row.erp_residual)}};
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(std::move(j));
  }
  return {{"schema", kReportSchema},
          {"family", family},
          {"tolerances", {{"tol", tol}}},
          {"F_inf_estimate", number(r.F_inf)},
          {"F_sup_estimate", number(r.F_sup)},
          {"argmax", number(r.argmax)},
          {"rows", rows}};
}

json flow_json(const std::string& family, const FlowResult& r, double t_end) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"t", number(s.t)},
                       {"F", number(s.F)},
                       {"tau_norm2", number(s.tau_norm2)},
                       {"dt", number(s.dt)},
                       {"closedness_drift", number(s.closedness_drift)},
                       {"phi", std::vector<double>(s.phi.coeffs().begin(), s.phi.coeffs().end())}});
  return {{"schema", kReportSchema},
          {"family", family},
          {"t_end", t_end},
          {"monotonicity", to_string(flow_monotonicity(r))},
          {"truncated", r.truncated},
          {"aborted", r.aborted},
          {"rejected_steps", r.rejected_steps},
          {"samples", samples}};
}

json extremize_json(const std::string& family, const ExtremizeResult& r, Direction dir) {
  json a = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int j = 0; j < 3; ++j) row.push_back({{"re", r.a(i, j).real()}, {"im", r.a(i, j).imag()}});
    a.push_back(row);
  }
  return {{"schema", kReportSchema},
          {"family", family},
          {"direction", dir == Direction::max ? "max" : "min"},
          {"F", number(r.F)},
          {"grad_norm", number(r.grad_norm)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"escapes_to_degeneration", r.escapes_to_degeneration},
          {"endpoint", {{"complex", a}}},
          {"trace", r.trace}};
}

}  // namespace g2pinch
