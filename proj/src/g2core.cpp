#include "g2pinch/g2core.hpp"

#include "g2pinch/errors.hpp"
#include "g2pinch/solitonlab.hpp"

#include <cmath>

namespace g2pinch {

namespace {

KForm make_phi() {
  return KForm::basis({1, 2, 7}) + KForm::basis({3, 4, 7}) + KForm::basis({5, 6, 7}) +
         KForm::basis({1, 3, 5}) - KForm::basis({1, 4, 6}) - KForm::basis({2, 3, 6}) -
         KForm::basis({2, 4, 5});
}

// Numerical floor for |mu|-relative thresholds.
double scale_of(const LieBracket& mu) { return std::max(mu.norm(), 1e-300); }

struct IrreducibleBases {
  Eigen::MatrixXd l2_14;
  Eigen::MatrixXd l2_7;
  Eigen::MatrixXd l3_27;
};

IrreducibleBases build_bases(const KForm& phi) {
  IrreducibleBases out;
  // beta -> *(phi ^ beta) on 2-forms: eigenvalue -1 on Lambda^2_14, 2 on Lambda^2_7.
  const int n2 = binomial7(2);
  Eigen::MatrixXd m(n2, n2);
  for (int c = 0; c < n2; ++c) {
    KForm e(2);
    e[static_cast<std::size_t>(c)] = 1.0;
    m.col(c) = hodge(wedge(phi, e)).as_vector();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  int neg = 0;
  for (int i = 0; i < n2; ++i)
    if (es.eigenvalues()(i) < 0.0) ++neg;
  if (neg != 14) throw InconsistencyError("Lambda^2 splitting does not have dimensions 14 + 7");
  out.l2_14 = es.eigenvectors().leftCols(14);
  out.l2_7 = es.eigenvectors().rightCols(7);

  // Lambda^3_27 = ker(gamma -> (gamma ^ phi, gamma ^ *phi)).
  const KForm psi = hodge(phi);
  const int n3 = binomial7(3);
  Eigen::MatrixXd k(binomial7(6) + 1, n3);
  for (int c = 0; c < n3; ++c) {
    KForm e(3);
    e[static_cast<std::size_t>(c)] = 1.0;
    k.col(c).head(binomial7(6)) = wedge(e, phi).as_vector();
    k(binomial7(6), c) = wedge(e, psi)[0];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullV);
  out.l3_27 = svd.matrixV().rightCols(27);
  return out;
}

const IrreducibleBases& standard_bases() {
  static const IrreducibleBases b = build_bases(standard_phi());
  return b;
}

IrreducibleBases bases_for(const KForm& phi) {
  if (approx_equal(phi, standard_phi(), 1e-14)) return standard_bases();
  return build_bases(phi);
}

KForm combine(int degree, const Eigen::MatrixXd& basis, const Eigen::VectorXd& coeffs) {
  return KForm::from_vector(degree, basis * coeffs);
}

}  // namespace

const KForm& standard_phi() {
  static const KForm phi = make_phi();
  return phi;
}

const KForm& standard_psi() {
  static const KForm psi = hodge(standard_phi());
  return psi;
}

InducedMetric metric_from_threeform(const KForm& sigma) {
  if (sigma.degree() != 3) throw ValidationError("metric_from_threeform: expected a 3-form");
  if (sigma.has_nan()) throw ValidationError("metric_from_threeform: NaN coefficient");
  std::array<KForm, kDim> contractions;
  for (int i = 0; i < kDim; ++i) contractions[i] = interior(Mat7::Identity().col(i), sigma);
  Mat7 b;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j)
      b(i, j) = b(j, i) = wedge(wedge(contractions[i], contractions[j]), sigma)[0] / 6.0;

  const double det_b = b.determinant();
  Eigen::LLT<Mat7> llt(b);
  if (!(det_b > 0.0) || llt.info() != Eigen::Success)
    throw ValidationError("not a positive 3-form: induced bilinear form is not positive definite");

  InducedMetric out;
  out.metric = std::pow(det_b, -1.0 / 9.0) * b;
  out.volume = std::sqrt(out.metric.determinant());
  return out;
}

KForm OrthonormalFrame::to_original(const KForm& frame_form) const {
  return gl_pullback(p_inv, frame_form, PullbackConvention::raw);
}

OrthonormalFrame orthonormal_frame(const G2Structure& g) {
  OrthonormalFrame f;
  if (approx_equal(g.phi, standard_phi(), 0.0)) {
    f.p = f.p_inv = Mat7::Identity();
    f.in_frame = g;
    return f;
  }
  const Mat7 metric = metric_from_threeform(g.phi).metric;
  Eigen::SelfAdjointEigenSolver<Mat7> es(metric);
  const Eigen::Matrix<double, kDim, 1> ev = es.eigenvalues();
  f.p = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();
  f.p_inv = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  f.in_frame.phi = gl_pullback(f.p, g.phi, PullbackConvention::raw);
  f.in_frame.mu = g.mu.transformed(f.p_inv);
  return f;
}

double closedness_defect(const G2Structure& g) {
  const OrthonormalFrame f = orthonormal_frame(g);
  return ce_differential(f.in_frame.mu, f.in_frame.phi).norm() / scale_of(f.in_frame.mu);
}

TorsionTwoForm torsion_two_form(const G2Structure& g, bool allow_nonclosed, double tol) {
  const OrthonormalFrame f = orthonormal_frame(g);
  const LieBracket& mu = f.in_frame.mu;
  const KForm& phi = f.in_frame.phi;
  const KForm psi = hodge(phi);
  const double scale = scale_of(mu);

  TorsionTwoForm out;
  out.closed = ce_differential(mu, phi).norm() <= tol * scale;
  if (!out.closed && !allow_nonclosed)
    throw ValidationError("torsion_two_form: structure is not closed");

  const KForm dpsi = ce_differential(mu, psi);
  const KForm tau = -hodge(dpsi);
  out.coclosure_defect = (dpsi - wedge(tau, phi)).norm();
  out.lambda14_defect = (hodge(wedge(phi, tau)) + tau).norm();
  if (out.closed && (out.coclosure_defect > tol * scale || out.lambda14_defect > tol * scale))
    throw InconsistencyError("closed structure violates d*phi = tau ^ phi or tau in Lambda^2_14");
  out.tau = f.to_original(tau);
  return out;
}

KForm laplacian_phi(const G2Structure& g, LaplacianRoute route) {
  const OrthonormalFrame f = orthonormal_frame(g);
  const LieBracket& mu = f.in_frame.mu;
  const KForm& phi = f.in_frame.phi;
  // delta on 3-forms is -*d*, on 4-forms +*d*.
  const KForm tau = -hodge(ce_differential(mu, hodge(phi)));
  KForm lap = ce_differential(mu, tau);
  if (route == LaplacianRoute::general)
    lap += hodge(ce_differential(mu, hodge(ce_differential(mu, phi))));
  return f.to_original(lap);
}

const Eigen::MatrixXd& lambda2_14_basis() { return standard_bases().l2_14; }
const Eigen::MatrixXd& lambda2_7_basis() { return standard_bases().l2_7; }
const Eigen::MatrixXd& lambda3_27_basis() { return standard_bases().l3_27; }

TorsionTuple torsion_forms(const G2Structure& g) {
  const OrthonormalFrame f = orthonormal_frame(g);
  const LieBracket& mu = f.in_frame.mu;
  const KForm& phi = f.in_frame.phi;
  const KForm psi = hodge(phi);
  const IrreducibleBases bases = bases_for(phi);
  const KForm dphi = ce_differential(mu, phi);
  const KForm dpsi = ce_differential(mu, psi);

  const int n4 = binomial7(4), n5 = binomial7(5);
  // Unknowns: tau0 | tau1 (7) | tau2 (14) | tau3 (27).
  constexpr int o0 = 0, o1 = 1, o2 = 8, o3 = 22, nvar = 49;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n4 + n5, nvar);
  Eigen::VectorXd rhs(n4 + n5);
  rhs << dphi.as_vector(), dpsi.as_vector();

  sys.block(0, o0, n4, 1) = psi.as_vector();
  for (int i = 0; i < kDim; ++i) {
    const KForm e = KForm::basis({i + 1});
    sys.block(0, o1 + i, n4, 1) = 3.0 * wedge(e, phi).as_vector();
    sys.block(n4, o1 + i, n5, 1) = 4.0 * wedge(e, psi).as_vector();
  }
  for (int m = 0; m < 14; ++m)
    sys.block(n4, o2 + m, n5, 1) =
        wedge(KForm::from_vector(2, bases.l2_14.col(m)), phi).as_vector();
  for (int m = 0; m < 27; ++m)
    sys.block(0, o3 + m, n4, 1) = hodge(KForm::from_vector(3, bases.l3_27.col(m))).as_vector();

  const Eigen::VectorXd x = sys.colPivHouseholderQr().solve(rhs);

  TorsionTuple t;
  t.tau0 = x(o0);
  t.tau1 = KForm::from_vector(1, x.segment(o1, 7));
  t.tau2 = combine(2, bases.l2_14, x.segment(o2, 14));
  t.tau3 = combine(3, bases.l3_27, x.segment(o3, 27));
  const Eigen::VectorXd recon = sys * x - rhs;
  t.dphi_residual = recon.head(n4).norm();
  t.dpsi_residual = recon.tail(n5).norm();

  // Separate tau1 estimates from each equation on its own.
  const Eigen::MatrixXd first = sys.topRows(n4);
  Eigen::MatrixXd first_vars(n4, 35);
  first_vars << first.col(o0), first.middleCols(o1, 7), first.middleCols(o3, 27);
  const Eigen::VectorXd x1 = first_vars.colPivHouseholderQr().solve(rhs.head(n4));
  const Eigen::MatrixXd second = sys.bottomRows(n5);
  Eigen::MatrixXd second_vars(n5, 21);
  second_vars << second.middleCols(o1, 7), second.middleCols(o2, 14);
  const Eigen::VectorXd x2 = second_vars.colPivHouseholderQr().solve(rhs.tail(n5));
  t.tau1_mismatch = (x1.segment(1, 7) - x2.head(7)).norm();

  const double scale = scale_of(mu);
  if (t.dphi_residual > 1e-6 * scale || t.dpsi_residual > 1e-6 * scale)
    throw InconsistencyError("torsion forms do not reconstruct d phi and d *phi");
  return t;
}

std::string to_string(G2Class c) {
  switch (c) {
    case G2Class::P: return "P";
    case G2Class::C: return "C";
    case G2Class::CC: return "CC";
    case G2Class::LCP: return "LCP";
    case G2Class::LCC: return "LCC";
    case G2Class::NP: return "NP";
    case G2Class::LCNP: return "LCNP";
    case G2Class::ST: return "ST";
    case G2Class::LCB: return "LCB";
    case G2Class::EF: return "EF";
    case G2Class::E: return "E";
    case G2Class::LS: return "LS";
    case G2Class::RS: return "RS";
  }
  return "?";
}

std::vector<std::string> ClassFlags::names() const {
  std::vector<std::string> out;
  for (int i = 0; i < kG2ClassCount; ++i)
    if (bits[i]) out.push_back(to_string(static_cast<G2Class>(i)));
  return out;
}

const std::vector<std::pair<G2Class, G2Class>>& class_implications() {
  using enum G2Class;
  static const std::vector<std::pair<G2Class, G2Class>> arrows = {
      {P, C},     {P, LCP},    {P, NP},    {C, LCC},   {LCP, LCC}, {LCP, LCNP},
      {NP, LCNP}, {NP, CC},    {NP, EF},   {NP, E},    {EF, LS},   {E, RS},
      {LCC, LCB}, {LCNP, ST},  {CC, ST},   {ST, LCB},
  };
  return arrows;
}

ClassFlags close_under_implications(ClassFlags flags) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [from, to] : class_implications()) {
      if (flags.has(from) && !flags.has(to)) {
        flags.set(to);
        changed = true;
      }
    }
  }
  return flags;
}

ClassFlags classify(const G2Structure& g, const DelegatedFlags& delegated, double tol) {
  G2Structure unit = g;
  const double n = g.mu.norm();
  if (n > 0.0) unit.mu = g.mu.scaled(1.0 / n);

  const TorsionTuple t = torsion_forms(unit);
  const bool z0 = std::abs(t.tau0) <= tol;
  const bool z1 = t.tau1.norm() <= tol;
  const bool z2 = t.tau2.norm() <= tol;
  const bool z3 = t.tau3.norm() <= tol;
  const OrthonormalFrame f = orthonormal_frame(unit);
  const bool dtau1_zero = ce_differential(f.in_frame.mu, t.tau1).norm() <= tol;

  using enum G2Class;
  ClassFlags flags;
  flags.set(P, z0 && z1 && z2 && z3);
  flags.set(C, z0 && z1 && z3);
  flags.set(CC, z1 && z2);
  flags.set(LCP, z0 && z2 && z3);
  flags.set(LCC, z0 && z3);
  flags.set(NP, z1 && z2 && z3);
  flags.set(LCNP, z2 && z3);
  flags.set(ST, z2);
  flags.set(LCB, dtau1_zero);
  flags.set(EF, eigenform_fit(unit).residual <= tol);
  flags.set(E, delegated.einstein.value_or(false));
  flags.set(RS, delegated.ricci_soliton.value_or(false));
  flags.set(LS, delegated.laplacian_soliton.value_or(false));
  return close_under_implications(flags);
}

ErpResult erp_residual(const G2Structure& g, double tol) {
  const OrthonormalFrame f = orthonormal_frame(g);
  const LieBracket& mu = f.in_frame.mu;
  const KForm& phi = f.in_frame.phi;
  const double scale = scale_of(mu);
  if (ce_differential(mu, phi).norm() > tol * scale)
    throw ValidationError("erp_residual: structure is not closed");
  const KForm tau = -hodge(ce_differential(mu, hodge(phi)));
  ErpResult out;
  const double t2 = tau.norm2();
  if (std::sqrt(t2) <= tol * scale) {
    out.trivially_satisfied = true;
    return out;
  }
  const KForm defect =
      ce_differential(mu, tau) - (t2 / 6.0) * phi - (1.0 / 6.0) * hodge(wedge(tau, tau));
  out.residual = defect.norm() / t2;
  return out;
}

}  // namespace g2pinch
