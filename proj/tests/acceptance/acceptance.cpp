// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "../support/oracles.hpp"
#include "g2pinch/curvature.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/families.hpp"
#include "g2pinch/g2core.hpp"
#include "g2pinch/solitonlab.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace g2pinch;

namespace {

/// Collects failures for one criterion; the first few are printed as detail.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) details_ += (details_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string detail() const {
    if (ok()) return "";
    return details_ + (failures_ > 3 ? " (+" + std::to_string(failures_ - 3) + " more)" : "");
  }

 private:
  int failures_ = 0;
  std::string details_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

LieBracket mu_of(const CMat3& a) { return mu_from_matrix(AlmostAbelianSpec::from_complex(a)); }

CMat3 mu6(double a) {
  CMat3 m = CMat3::Zero();
  m(0, 1) = 1.0;
  m(1, 2) = a;
  return m;
}

double F_of(const std::string& family, const ParamMap& p) { return *pinching_F(catalog(family, p).mu).F; }

void check_abs(Check& c, const std::string& label, double got, double want, double tol = 1e-10) {
  c.require(std::abs(got - want) <= tol, label + ": got " + num(got) + ", expected " + num(want));
}

Check cross_pipeline() {
  Check c;
  oracle::Random rng(1001);
  for (int n = 0; n < 1000; ++n) {
    const CMat3 a = rng.sl3c();
    const double f = *pinching_F(mu_of(a)).F;
    const double g = F_almost_abelian(AlmostAbelianSpec::from_complex(a));
    c.require(std::abs(f - g) <= 1e-8 * f, "sample " + std::to_string(n) + ": " + num(f) + " vs " + num(g));
  }
  return c;
}

Check dual_ricci() {
  Check c;
  oracle::Random rng(1002);
  for (int n = 0; n < 500; ++n) {
    LieBracket mu;
    switch (n % 3) {
      case 0: mu = mu_of(rng.sl3c()); break;
      case 1: mu = mu_from_matrix(AlmostAbelianSpec::from_real(rng.real6())); break;
      default: mu = rng.solvable(); break;
    }
    const double dev = (ricci_oracle(mu).ricci.ric - ricci_closed_form(mu).ric).cwiseAbs().maxCoeff();
    c.require(dev <= 1e-9, "sample " + std::to_string(n) + ": deviation " + num(dev));
  }
  return c;
}

Check point_values() {
  Check c;
  check_abs(c, "mu6(1)", F_of("mu6", {{"a", 1.0}}), 0.8);
  const ScanResult s = scan("mu6", parse_grid("a=0.2:3:0.05"));
  c.require(s.argmax && std::abs(*s.argmax - 1.0) <= 1e-9, "mu6 grid argmax is not a = 1");
  check_abs(c, "mu6 grid max", s.F_sup.value_or(0.0), 0.8);
  check_abs(c, "mu6(sqrt 2)", F_of("mu6", {{"a", std::sqrt(2.0)}}), 0.75);
  check_abs(c, "E12", F_of("mu2", {}), 0.5);
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.1 * i, t2 = t * t;
    check_abs(c, "A_t(" + num(t) + ")", F_of("A_t", {{"t", t}}), t2 / (1 + t2));
    check_abs(c, "B_t(" + num(t) + ")", F_of("B_t", {{"t", t}}), 1.0);
    check_abs(c, "C_t(" + num(t) + ")", F_of("C_t", {{"t", t}}), 4 * t2 / (4 * t2 + 1));
    check_abs(c, "D_t(" + num(t) + ", a-b=1)", F_of("D_t", {{"a", 0.5}, {"b", -0.5}, {"t", t}}), t2 / (t2 + 1));
  }
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1, -2}, {1, 2}, {0.3, 0.8}, {2, -0.5}}) {
    const double s4 = std::pow(a + b, 4), d = a * a - b * b;
    check_abs(c, "(a,b)=(" + num(a) + "," + num(b) + ")", F_of("ab", {{"a", a}, {"b", b}}), s4 / (s4 + d * d));
  }
  check_abs(c, "mu_heis", F_of("mu_heis", {}), 1.0 / 3.0);
  check_abs(c, "mu_hyp", F_of("mu_hyp", {}), 7.0);
  const double e = einstein_residual(catalog("mu_hyp").mu);
  c.require(e <= 1e-10, "mu_hyp Einstein residual " + num(e));
  return c;
}

Check identities() {
  Check c;
  oracle::Random rng(1004);
  for (int n = 0; n < 100; ++n) {
    const LieBracket mu = mu_of(rng.sl3c());
    const G2Structure g = G2Structure::standard(mu);
    const TorsionTwoForm t = torsion_two_form(g);
    const double tau2 = t.tau.norm2();
    const double scal = ricci_oracle(mu).ricci.scal;
    c.require(std::abs(scal + 0.5 * tau2) <= 1e-9 * std::max(1.0, tau2), "scal = -|tau|^2/2 fails: " + num(scal));
    c.require(approx_equal(ce_differential(mu, standard_psi()), wedge(t.tau, standard_phi()), 1e-9),
              "d*phi = tau ^ phi fails");
    c.require(approx_equal(hodge(wedge(standard_phi(), t.tau)), -1.0 * t.tau, 1e-9), "*(phi ^ tau) = -tau fails");
    const TorsionTuple tt = torsion_forms(g);
    c.require(std::abs(tt.tau0) <= 1e-9 && tt.tau1.norm() <= 1e-9 && tt.tau3.norm() <= 1e-9,
              "tau0, tau1, tau3 nonzero on a closed structure");
  }
  for (int n = 0; n < 50; ++n) {
    const LieBracket mu = n % 2 ? rng.solvable() : mu_from_matrix(AlmostAbelianSpec::from_real(rng.real6()));
    const TorsionTuple t = torsion_forms(G2Structure::standard(mu));
    const KForm dphi = t.tau0 * standard_psi() + 3.0 * wedge(t.tau1, standard_phi()) + hodge(t.tau3);
    const double scale = std::max(1.0, mu.norm());
    c.require(approx_equal(dphi, ce_differential(mu, standard_phi()), 1e-9 * scale), "d phi reconstruction fails");
    c.require(t.dphi_residual <= 1e-9 * scale && t.dpsi_residual <= 1e-9 * scale, "torsion residuals too large");
  }
  for (int k = 0; k <= kDim; ++k) {
    const KForm a = rng.form(k);
    c.require(approx_equal(hodge(hodge(a)), a, 1e-12), "** != id in degree " + std::to_string(k));
  }
  // d^2 = 0 exactly for Lie brackets, and grows linearly with an injected Jacobi violation
  const LieBracket base = mu_from_matrix(AlmostAbelianSpec::from_real(rng.real6()));
  LieBracket noise;
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) noise.set(i, j, k, rng.uniform());
  auto d2 = [&](double delta) {
    LieBracket mu = base;
    for (int i = 0; i < kDim; ++i)
      for (int j = i + 1; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) mu.set(i, j, k, base(i, j, k) + delta * noise(i, j, k));
    double total = 0.0;
    for (int k = 0; k < kDim; ++k) total += ce_differential(mu, ce_differential(mu, KForm::basis({k + 1}))).norm2();
    return std::sqrt(total);
  };
  c.require(d2(0.0) <= 1e-12, "d^2 != 0 on a Lie bracket");
  const double ratio = d2(1e-2) / d2(1e-3);
  c.require(jacobi_residual(base) <= 1e-12 && std::abs(ratio - 10.0) <= 0.5,
            "d^2 does not track the Jacobi violation (ratio " + num(ratio) + ")");
  const InducedMetric m = metric_from_threeform(standard_phi());
  c.require((m.metric - Mat7::Identity()).norm() <= 1e-14, "metric of phi is not the identity");
  return c;
}

Check solitons() {
  Check c;
  oracle::Random rng(1005);
  for (int n = 0; n < 100; ++n) {
    const double r = laplacian_soliton_fit(G2Structure::standard(mu_of(rng.normal_sl3c()))).residual;
    c.require(r <= 1e-7, "normal sample " + std::to_string(n) + " residual " + num(r));
  }
  for (double t : {0.3, 0.7, 1.2}) {
    const double r = laplacian_soliton_fit(G2Structure::standard(catalog("B_t", {{"t", t}}).mu)).residual;
    c.require(r <= 1e-7, "B_t(" + num(t) + ") residual " + num(r));
  }
  const double r6 = laplacian_soliton_fit(G2Structure::standard(mu_of(mu6(std::sqrt(2.0))))).residual;
  c.require(r6 <= 1e-6, "mu6(sqrt 2) residual " + num(r6));
  const double rs = ricci_soliton_residual(mu_of(mu6(1.0))).residual;
  c.require(rs <= 1e-8, "mu6(1) Ricci soliton residual " + num(rs));
  const CMat3 a = mu6(1.0);
  const CMat3 at = a.transpose();
  const CMat3 comm = a * (a * at - at * a) - (a * at - at * a) * a;
  c.require(comm == -a, "[A, [A, A^t]] != -A at mu6(1)");
  const SolvsolitonCheck s = solvsoliton_check_aa(AlmostAbelianSpec::from_complex(a));
  c.require(s.nilpotent && s.solvsoliton && s.c && *s.c == -1.0, "nilsoliton check at mu6(1)");
  return c;
}

Check erp() {
  Check c;
  oracle::Random rng(1006);
  for (int n = 0; n < 50; ++n) {
    const LieBracket mu = mu_of(rng.sl3c());
    const ErpResult e = erp_residual(G2Structure::standard(mu));
    c.require(!e.trivially_satisfied && e.residual > 0.05, "sample " + std::to_string(n) + " residual " + num(e.residual));
    const double scaled = erp_residual(G2Structure::standard(mu.scaled(3.7))).residual;
    c.require(std::abs(scaled - e.residual) <= 1e-10, "scale invariance: " + num(e.residual) + " vs " + num(scaled));
  }
  for (int n = 0; n < 10; ++n)
    c.require(erp_residual(G2Structure::standard(mu_of(rng.su3()))).trivially_satisfied,
              "torsion-free input not flagged trivial");
  return c;
}

Check flow() {
  Check c;
  using clock = std::chrono::steady_clock;
  auto run = [&](const LieBracket& mu, double t_end, double dt) {
    const auto start = clock::now();
    FlowResult r = laplacian_flow(G2Structure::standard(mu), t_end, dt);
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    c.require(secs <= 60.0, "trajectory took " + num(secs) + " s");
    c.require(!r.truncated && !r.aborted, "trajectory truncated or aborted");
    return r;
  };
  const FlowResult dec = run(catalog("ab", {{"a", 1.0}, {"b", -2.0}}).mu, 0.5, 0.005);
  c.require(dec.samples.size() >= 50, "only " + std::to_string(dec.samples.size()) + " samples from (1,-2)");
  c.require(flow_monotonicity(dec) == Monotonicity::decreasing, "(1,-2) is " + to_string(flow_monotonicity(dec)));
  const FlowResult inc = run(catalog("ab", {{"a", 1.0}, {"b", 2.0}}).mu, 0.5, 0.005);
  c.require(inc.samples.size() >= 50, "only " + std::to_string(inc.samples.size()) + " samples from (1,2)");
  c.require(flow_monotonicity(inc) == Monotonicity::increasing, "(1,2) is " + to_string(flow_monotonicity(inc)));

  oracle::Random rng(1007);
  const FlowResult tf = run(mu_of(rng.su3()), 0.5, 0.01);
  const double drift = (tf.samples.back().phi - standard_phi()).norm();
  c.require(drift <= 1e-10, "torsion-free start moved by " + num(drift));

  const FlowResult sol = run(catalog("B_t", {{"t", 0.5}}).mu, 0.5, 0.01);
  for (const auto& s : sol.samples)
    c.require(s.F && std::abs(*s.F - 1.0) <= 1e-6, "B_0.5 F drifted to " + num(s.F.value_or(NAN)));
  return c;
}

Check extremization() {
  Check c;
  const ExtremizeResult m = extremize_F(AlmostAbelianSpec::from_complex(mu6(2.0)), Direction::max);
  c.require(std::abs(m.F - 0.8) <= 1e-6, "mu6(2) endpoint F " + num(m.F));
  CMat3 a;
  a << 1, 1, 0, 0, -1, 0, 0, 0, 0;
  const ExtremizeResult s = extremize_F(AlmostAbelianSpec::from_complex(a), Direction::max);
  c.require(std::abs(s.F - 1.0) <= 1e-6, "semisimple endpoint F " + num(s.F));
  c.require(s.grad_norm <= 1e-8, "semisimple endpoint |grad| " + num(s.grad_norm));
  return c;
}

Check bounds() {
  Check c;
  oracle::Random rng(1009);
  for (int n = 0; n < 300; ++n) {
    LieBracket mu;
    switch (n % 3) {
      case 0: mu = mu_of(rng.sl3c()); break;
      case 1: mu = mu_of(rng.normal_sl3c()); break;
      default: mu = mu_of(rng.sl3c()).transformed(rng.orthogonal()); break;
    }
    const PinchReport p = pinching_F(mu);
    if (p.flat) continue;
    c.require(p.F && *p.F > 0.0 && *p.F < 7.0, "closed sample F = " + num(p.F.value_or(NAN)));
  }
  for (const char* fam : {"A_t", "C_t"})
    for (double t : {0.05, 0.5, 5.0}) {
      const double f = F_of(fam, {{"t", t}});
      c.require(f > 0.0 && f < 7.0, std::string(fam) + " F = " + num(f));
    }
  for (int n = 0; n < 1000; ++n) {
    const Mat6 a = rng.real6();
    const double f = *pinching_F(mu_from_matrix(AlmostAbelianSpec::from_real(a))).F;
    const double bound = F_riemannian_bound(a);
    c.require(f <= bound * (1 + 1e-12), "F = " + num(f) + " above bound " + num(bound));
  }
  return c;
}

Check classifier() {
  Check c;
  oracle::Random rng(1010);
  for (int n = 0; n < 1000; ++n) {
    LieBracket mu;
    switch (n % 4) {
      case 0: mu = mu_of(rng.sl3c()); break;
      case 1: mu = mu_from_matrix(AlmostAbelianSpec::from_real(rng.real6())); break;
      case 2: mu = rng.solvable(); break;
      default: mu = rng.two_step_nilpotent(); break;
    }
    const ClassFlags f = classify(G2Structure::standard(mu));
    for (const auto& [from, to] : class_implications())
      c.require(!f.has(from) || f.has(to), "sample " + std::to_string(n) + ": " + to_string(from) + " without " +
                                               to_string(to));
  }
  for (int n = 0; n < 20; ++n)
    c.require(classify(G2Structure::standard(mu_of(rng.su3()))).has(G2Class::P), "su(3) input not classified as P");
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"cross-pipeline F agreement", cross_pipeline},
      {"dual-route Ricci", dual_ricci},
      {"point values", point_values},
      {"identity suite", identities},
      {"soliton suite", solitons},
      {"ERP suite", erp},
      {"flow monotonicity", flow},
      {"extremization", extremization},
      {"bound checks", bounds},
      {"classifier coherence", classifier},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %zu (%s): %s%s%s\n", i + 1, criteria[i].first.c_str(), c.ok() ? "PASS" : "FAIL",
                c.ok() ? "" : " - ", c.detail().c_str());
    std::fflush(stdout);
    if (!c.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
