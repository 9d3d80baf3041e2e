#include "g2pinch/families.hpp"

#include "g2pinch/curvature.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/solitonlab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <thread>

namespace g2pinch {

namespace {

using cd = std::complex<double>;
constexpr double kInf = 1e300;

ParamRange any(const std::string& name) { return {name, -kInf, kInf, false, false}; }
ParamRange positive(const std::string& name) { return {name, 0.0, kInf, true, false}; }

double get(const ParamMap& p, const std::string& k) { return p.at(k); }

std::string valid_family_list() {
  std::ostringstream s;
  s << "valid families:";
  for (const auto& f : family_specs()) s << ' ' << f.name;
  return s.str();
}

CMat3 diag3(cd a, cd b, cd c) {
  CMat3 m = CMat3::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

void require_unit_alpha(cd alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-9)
    throw ValidationError("normal form requires |alpha| = 1");
  if (std::abs(alpha - cd(0, 1)) <= 1e-9 || std::abs(alpha + cd(0, 1)) <= 1e-9)
    throw ValidationError("normal form requires alpha != +-i");
}

CMat3 family_matrix(const std::string& name, const ParamMap& p) {
  CMat3 m = CMat3::Zero();
  if (name == "A_t") {
    const double t = get(p, "t");
    m << t, -1, 0, 1, -t, 0, 0, 0, 0;
  } else if (name == "B_t") {
    const double t = get(p, "t");
    m << t, -1, 0, 1, t, 0, 0, 0, -2 * t;
  } else if (name == "C_t") {
    const double t = get(p, "t");
    m << t, -1, 0, 1, 0, 0, 0, 0, -t;
  } else if (name == "D_t") {
    const double a = get(p, "a"), b = get(p, "b"), t = get(p, "t");
    if (std::abs(a - b) <= 1e-12) throw ValidationError("D_t requires a != b");
    m = diag3(cd(0, a), cd(0, b), cd(0, -a - b));
    m(0, 1) = t;
  } else if (name == "ab") {
    m(0, 1) = get(p, "a");
    m(1, 0) = get(p, "b");
  } else if (name == "mu6") {
    // G2-equivalent to the printed [[0,a,0],[0,0,1],[0,0,0]] read in the
    // dual-basis convention; F(a) is the same and the Laplacian soliton sits at a = sqrt 2.
    m(0, 1) = 1.0;
    m(1, 2) = get(p, "a");
  } else if (name == "mu2" || name == "nf_nil2") {
    m(0, 1) = 1.0;
  } else if (name == "nf_nil3") {
    m(0, 1) = 1.0;
    m(1, 2) = 1.0;
  } else if (name == "nf_diag") {
    const cd alpha(get(p, "alpha_re"), get(p, "alpha_im"));
    const cd beta(get(p, "beta_re"), get(p, "beta_im"));
    require_unit_alpha(alpha);
    m = diag3(alpha, beta, -alpha - beta);
  } else if (name == "nf_jordan") {
    const cd alpha(get(p, "alpha_re"), get(p, "alpha_im"));
    require_unit_alpha(alpha);
    m = diag3(alpha, alpha, -2.0 * alpha);
    m(0, 1) = 1.0;
  } else if (name == "nf_imag_diag") {
    const double a = get(p, "a");
    m = diag3(cd(0, 1), cd(0, a), cd(0, -1.0 - a));
  } else if (name == "nf_imag_jordan") {
    m = diag3(cd(0, 1), cd(0, 1), cd(0, -2));
    m(0, 1) = 1.0;
  } else {
    throw ValidationError("unknown family '" + name + "'; " + valid_family_list());
  }
  return m;
}

LieBracket bracket_family(const std::string& name) {
  LieBracket mu;
  if (name == "mu_heis") {
    mu.set(0, 1, 2, 1.0);
  } else if (name == "mu_hyp") {
    for (int i = 0; i < 6; ++i) mu.set(6, i, i, 1.0);
  } else if (name != "zero") {
    throw ValidationError("unknown family '" + name + "'; " + valid_family_list());
  }
  return mu;
}

}  // namespace

bool ParamRange::contains(double v) const {
  if (!std::isfinite(v)) return false;
  const bool above = lo_open ? v > lo : v >= lo;
  const bool below = hi_open ? v < hi : v <= hi;
  return above && below;
}

std::string ParamRange::describe() const {
  std::ostringstream s;
  const bool no_lo = lo <= -kInf, no_hi = hi >= kInf;
  s << name << " in " << (lo_open || no_lo ? '(' : '[');
  if (no_lo) s << "-inf"; else s << lo;
  s << ", ";
  if (no_hi) s << "inf"; else s << hi;
  s << (hi_open || no_hi ? ')' : ']');
  return s.str();
}

const std::vector<FamilySpec>& family_specs() {
  static const std::vector<FamilySpec> specs = {
      {"A_t", "[[t,-1,0],[1,-t,0],[0,0,0]]", {any("t")}},
      {"B_t", "[[t,-1,0],[1,t,0],[0,0,-2t]], normal", {any("t")}},
      {"C_t", "[[t,-1,0],[1,0,0],[0,0,-t]]", {positive("t")}},
      {"D_t", "[[ai,t,0],[0,bi,0],[0,0,ci]], c = -a-b, a != b", {any("a"), any("b"), any("t")}},
      {"ab", "[[0,a,0],[b,0,0],[0,0,0]]", {any("a"), any("b")}},
      {"mu6", "nilpotent [[0,1,0],[0,0,a],[0,0,0]], a > 0", {positive("a")}},
      {"mu2", "nilpotent E12", {}},
      {"nf_diag", "diag(alpha, beta, -alpha-beta), |alpha| = 1, alpha != +-i",
       {any("alpha_re"), any("alpha_im"), any("beta_re"), any("beta_im")}},
      {"nf_jordan", "[[alpha,1,0],[0,alpha,0],[0,0,-2alpha]], |alpha| = 1, alpha != +-i",
       {any("alpha_re"), any("alpha_im")}},
      {"nf_nil2", "E12", {}},
      {"nf_nil3", "E12 + E23", {}},
      {"nf_imag_diag", "diag(i, ai, bi), b = -1-a", {any("a")}},
      {"nf_imag_jordan", "[[i,1,0],[0,i,0],[0,0,-2i]]", {}},
      {"mu_heis", "[e1,e2] = e3", {}, false},
      {"mu_hyp", "[e7,e_i] = e_i, i <= 6", {}, false},
      {"zero", "abelian", {}, false},
  };
  return specs;
}

const FamilySpec& find_family(const std::string& name) {
  for (const auto& f : family_specs())
    if (f.name == name) return f;
  throw ValidationError("unknown family '" + name + "'; " + valid_family_list());
}

CatalogEntry catalog(const std::string& name, const ParamMap& params) {
  const FamilySpec& fam = find_family(name);
  for (const auto& [k, v] : params) {
    const auto it = std::find_if(fam.params.begin(), fam.params.end(),
                                 [&](const ParamRange& r) { return r.name == k; });
    if (it == fam.params.end())
      throw ValidationError("family " + name + " has no parameter '" + k + "'");
    if (!it->contains(v)) {
      std::ostringstream s;
      s << "parameter out of range for " << name << ": " << k << " = " << v << " (" << it->describe()
        << ")";
      throw ValidationError(s.str());
    }
  }
  for (const auto& r : fam.params)
    if (!params.count(r.name))
      throw ValidationError("family " + name + " needs parameter '" + r.name + "'");

  CatalogEntry e;
  e.family = name;
  e.params = params;
  if (fam.almost_abelian) {
    e.spec = AlmostAbelianSpec::from_complex(family_matrix(name, params));
    e.mu = mu_from_matrix(*e.spec);
  } else {
    e.mu = bracket_family(name);
  }
  return e;
}

std::optional<double> family_reference_F(const std::string& name, const ParamMap& p) {
  auto ratio = [](double num, double den) -> std::optional<double> {
    if (den == 0.0) return std::nullopt;
    return num / den;
  };
  if (name == "A_t") {
    const double t = get(p, "t");
    return ratio(std::pow(t, 4), std::pow(t, 4) + t * t);
  }
  if (name == "B_t") return get(p, "t") != 0.0 ? std::optional<double>(1.0) : std::nullopt;
  if (name == "C_t") {
    const double t = get(p, "t");
    return ratio(4 * std::pow(t, 4), 4 * std::pow(t, 4) + t * t);
  }
  if (name == "D_t") {
    const double t = get(p, "t"), d = get(p, "a") - get(p, "b");
    return ratio(std::pow(t, 4), 2 * std::pow(t, 4) + d * d * t * t);
  }
  if (name == "ab") {
    const double a = get(p, "a"), b = get(p, "b");
    return ratio(std::pow(a + b, 4), std::pow(a + b, 4) + std::pow(a * a - b * b, 2));
  }
  if (name == "mu6") {
    const double a = get(p, "a");
    return (std::pow(a, 4) + 2 * a * a + 1) / (2 * std::pow(a, 4) + a * a + 2);
  }
  if (name == "mu2" || name == "nf_nil2") return 0.5;
  if (name == "nf_nil3") return 0.8;
  if (name == "mu_heis") return 1.0 / 3.0;
  if (name == "mu_hyp") return 7.0;
  return std::nullopt;
}

Grid parse_grid(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("grid must look like name=a:b:step");
  Grid g;
  g.param = text.substr(0, eq);
  std::vector<double> parts;
  std::stringstream ss(text.substr(eq + 1));
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw ValidationError("bad number in grid: " + tok);
    } catch (const std::logic_error&) {
      throw ValidationError("bad number in grid: " + tok);
    }
  }
  if (parts.size() != 3) throw ValidationError("grid must look like name=a:b:step");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || b < a) throw ValidationError("grid needs step > 0 and a <= b");
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 1000000) throw ValidationError("grid has too many points");
  for (long i = 0; i < count; ++i) g.values.push_back(a + static_cast<double>(i) * step);
  return g;
}

ScanRow evaluate_row(const std::string& family, const ParamMap& params, double tol) {
  ScanRow row;
  row.params = params;
  try {
    const CatalogEntry e = catalog(family, params);
    row.reference_F = family_reference_F(family, params);
    const PinchReport pin = pinching_F(e.mu);
    row.F = pin.F;
    row.scal = pin.ricci.scal;
    const G2Structure g = G2Structure::standard(e.mu);
    const TorsionTwoForm tt = torsion_two_form(g, true, tol);
    row.closed = tt.closed;
    row.tau_norm2 = tt.tau.norm2();

    DelegatedFlags delegated;
    delegated.einstein = pin.ricci.ric_norm2 == 0.0 || einstein_residual(e.mu) <= 1e-8;
    delegated.ricci_soliton = ricci_soliton_residual(e.mu).residual <= 1e-8;
    if (row.closed) {
      const SolitonFit fit = laplacian_soliton_fit(g);
      row.lap_soliton_residual = fit.residual;
      row.lap_soliton_c = fit.c;
      delegated.laplacian_soliton = fit.residual <= 1e-8;
      const ErpResult erp = erp_residual(g, tol);
      if (!erp.trivially_satisfied) row.erp_residual = erp.residual;
    }
    row.classes = classify(g, delegated, tol);
  } catch (const std::exception& ex) {
    row.error = ex.what();
  }
  return row;
}

ScanResult scan(const std::string& family, const Grid& grid, const ParamMap& base,
                unsigned threads, double tol) {
  const FamilySpec& fam = find_family(family);
  if (std::none_of(fam.params.begin(), fam.params.end(),
                   [&](const ParamRange& r) { return r.name == grid.param; }))
    throw ValidationError("family " + family + " has no parameter '" + grid.param + "'");

  ScanResult out;
  out.rows.resize(grid.values.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, grid.values.size())));

  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < grid.values.size(); i += threads) {
      ParamMap p = base;
      p[grid.param] = grid.values[i];
      out.rows[i] = evaluate_row(family, p, tol);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
  }

  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& f = out.rows[i].F;
    if (!f || !out.rows[i].error.empty()) continue;
    if (!out.F_inf || *f < *out.F_inf) out.F_inf = *f;
    if (!out.F_sup || *f > *out.F_sup) {
      out.F_sup = *f;
      out.argmax = grid.values[i];
    }
  }
  return out;
}

std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::constant: return "constant";
    case Monotonicity::mixed: return "mixed";
  }
  return "mixed";
}

Monotonicity flow_monotonicity(const FlowResult& r, double constant_tol) {
  std::vector<double> f;
  for (const auto& s : r.samples)
    if (s.F) f.push_back(*s.F);
  if (f.size() < 2) return Monotonicity::constant;
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (*hi - *lo <= constant_tol) return Monotonicity::constant;
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (!(f[i] > f[i - 1])) inc = false;
    if (!(f[i] < f[i - 1])) dec = false;
  }
  if (inc) return Monotonicity::increasing;
  if (dec) return Monotonicity::decreasing;
  return Monotonicity::mixed;
}

}  // namespace g2pinch
