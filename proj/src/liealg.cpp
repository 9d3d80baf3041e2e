#include "g2pinch/liealg.hpp"

#include "g2pinch/errors.hpp"
#include "g2pinch/g2core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace g2pinch {

namespace {

constexpr double kRankRelTol = 1e-8;

// Orthonormal basis of the column span of m, rank decided relative to the
// largest singular value.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return Eigen::MatrixXd(kDim, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 1e-12) return Eigen::MatrixXd(kDim, 0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > kRankRelTol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

Eigen::MatrixXd bracket_span(const LieBracket& mu, const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& v) {
  Eigen::MatrixXd gens(kDim, u.cols() * v.cols());
  Eigen::Index col = 0;
  for (Eigen::Index a = 0; a < u.cols(); ++a)
    for (Eigen::Index b = 0; b < v.cols(); ++b) gens.col(col++) = mu.bracket(u.col(a), v.col(b));
  return span_basis(gens);
}

LieBracket unit_normalized(const LieBracket& mu) {
  const double n = mu.norm();
  return n > 0.0 ? mu.scaled(1.0 / n) : mu;
}

}  // namespace

void LieBracket::set(int i, int j, int k, double v) {
  if (i == j) {
    if (v != 0.0) throw ValidationError("bracket [e_i, e_i] must vanish");
    return;
  }
  c_[index(i, j, k)] = v;
  c_[index(j, i, k)] = -v;
}

Vec7 LieBracket::bracket(const Vec7& x, const Vec7& y) const {
  Vec7 out = Vec7::Zero();
  for (int i = 0; i < kDim; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < kDim; ++j) {
      const double w = x(i) * y(j);
      if (w == 0.0) continue;
      for (int k = 0; k < kDim; ++k) out(k) += w * c_[index(i, j, k)];
    }
  }
  return out;
}

Mat7 LieBracket::ad(int i) const {
  Mat7 m;
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) m(k, j) = c_[index(i, j, k)];
  return m;
}

Mat7 LieBracket::ad(const Vec7& x) const {
  Mat7 m = Mat7::Zero();
  for (int i = 0; i < kDim; ++i)
    if (x(i) != 0.0) m += x(i) * ad(i);
  return m;
}

double LieBracket::norm2() const {
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) s += c_[index(i, j, k)] * c_[index(i, j, k)];
  return s;
}

double LieBracket::norm() const { return std::sqrt(norm2()); }

LieBracket LieBracket::scaled(double s) const {
  LieBracket out = *this;
  for (double& v : out.c_) v *= s;
  return out;
}

LieBracket LieBracket::transformed(const LinearMap7& h) const {
  Eigen::FullPivLU<Mat7> lu(h);
  if (!lu.isInvertible()) throw ValidationError("bracket change of basis needs an invertible map");
  const Mat7 hinv = lu.inverse();
  LieBracket out;
  for (int a = 0; a < kDim; ++a) {
    for (int b = a + 1; b < kDim; ++b) {
      const Vec7 v = h * bracket(hinv.col(a), hinv.col(b));
      for (int k = 0; k < kDim; ++k) out.set(a, b, k, v(k));
    }
  }
  return out;
}

bool LieBracket::has_nan() const {
  return std::any_of(c_.begin(), c_.end(), [](double v) { return std::isnan(v); });
}

double jacobi_residual(const LieBracket& mu) {
  double s = 0.0;
  const Mat7 id = Mat7::Identity();
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        const Vec7 x = id.col(i), y = id.col(j), z = id.col(k);
        const Vec7 jac = mu.bracket(mu.bracket(x, y), z) + mu.bracket(mu.bracket(y, z), x) +
                         mu.bracket(mu.bracket(z, x), y);
        s += jac.squaredNorm();
      }
  return std::sqrt(s);
}

StructureFlags structure_flags(const LieBracket& mu, double tol) {
  const LieBracket m = unit_normalized(mu);
  if (m.has_nan() || jacobi_residual(m) > tol)
    throw ValidationError("structure_flags: bracket fails the Jacobi identity");

  StructureFlags f;
  const Eigen::MatrixXd full = Eigen::MatrixXd::Identity(kDim, kDim);

  Eigen::MatrixXd derived = full;
  f.derived_dims.push_back(kDim);
  for (int step = 0; step < kDim && derived.cols() > 0; ++step) {
    Eigen::MatrixXd next = bracket_span(m, derived, derived);
    if (next.cols() == derived.cols()) break;
    derived = std::move(next);
    f.derived_dims.push_back(static_cast<int>(derived.cols()));
  }
  f.solvable = derived.cols() == 0;

  Eigen::MatrixXd lower = full;
  f.lower_central_dims.push_back(kDim);
  for (int step = 0; step < kDim && lower.cols() > 0; ++step) {
    Eigen::MatrixXd next = bracket_span(m, full, lower);
    if (next.cols() == lower.cols()) break;
    lower = std::move(next);
    f.lower_central_dims.push_back(static_cast<int>(lower.cols()));
  }
  f.nilpotent = lower.cols() == 0;

  f.unimodular = true;
  for (int i = 0; i < kDim; ++i)
    if (std::abs(m.ad(i).trace()) > tol) f.unimodular = false;
  return f;
}

KForm ce_differential(const LieBracket& mu, const KForm& a) {
  const int k = a.degree();
  if (k == kDim) return KForm(kDim);
  // d e^m = -sum_{i<j} c(i, j, m) e^{ij}
  std::array<KForm, kDim> de;
  for (int m = 0; m < kDim; ++m) {
    KForm f(2);
    for (int i = 0; i < kDim; ++i)
      for (int j = i + 1; j < kDim; ++j)
        f.coeff(static_cast<IndexMask>((1u << i) | (1u << j))) = -mu(i, j, m);
    de[m] = std::move(f);
  }
  KForm out(k + 1);
  const auto masks = masks_of_degree(k);
  for (std::size_t p = 0; p < masks.size(); ++p) {
    if (a[p] == 0.0) continue;
    // Leibniz: d(e^{i_1} ^ .. ^ e^{i_k}) = sum_m (-1)^{m} e^{i_1..i_{m}} ^ d e^{i_{m+1}} ^ ..
    std::vector<int> idx;
    for (int i = 0; i < kDim; ++i)
      if (masks[p] & (1u << i)) idx.push_back(i);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      KForm term = KForm::scalar((m & 1) ? -a[p] : a[p]);
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const KForm factor = q == m ? de[idx[q]] : KForm::basis({idx[q] + 1});
        term = wedge(term, factor);
      }
      out += term;
    }
  }
  return out;
}

Eigen::MatrixXd derivation_system(const LieBracket& mu) {
  constexpr int kPairs = kDim * (kDim - 1) / 2;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(kPairs * kDim, kDim * kDim);
  auto var = [](int row, int col) { return row + kDim * col; };
  int pair = 0;
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j, ++pair) {
      for (int k = 0; k < kDim; ++k) {
        const int r = pair * kDim + k;
        for (int l = 0; l < kDim; ++l) {
          sys(r, var(k, l)) += mu(i, j, l);   // D[e_i, e_j]
          sys(r, var(l, i)) -= mu(l, j, k);   // [D e_i, e_j]
          sys(r, var(l, j)) -= mu(i, l, k);   // [e_i, D e_j]
        }
      }
    }
  }
  return sys;
}

DerivationBasis derivations(const LieBracket& mu) {
  if (jacobi_residual(unit_normalized(mu)) > 1e-8)
    throw ValidationError("derivations: bracket fails the Jacobi identity");
  const Eigen::MatrixXd sys = derivation_system(mu);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  constexpr Eigen::Index n = kDim * kDim;

  Eigen::Index rank = 0;
  if (s(0) > 0.0)
    while (rank < s.size() && s(rank) > kRankRelTol * s(0)) ++rank;

  DerivationBasis out;
  out.singular_values = s;
  out.dimension = static_cast<int>(n - rank);
  if (rank == 0 || rank == n || s(rank) == 0.0)
    out.threshold_gap = std::numeric_limits<double>::infinity();
  else
    out.threshold_gap = s(rank - 1) / s(rank);
  out.ill_conditioned = out.threshold_gap < 10.0;

  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index c = rank; c < n; ++c) {
    LinearMap7 d;
    for (int col = 0; col < kDim; ++col)
      for (int row = 0; row < kDim; ++row) d(row, col) = v(row + kDim * col, c);
    out.elements.push_back(d);
  }
  return out;
}

double derivation_defect(const LieBracket& mu, const LinearMap7& d) {
  double worst = 0.0;
  const Mat7 id = Mat7::Identity();
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j) {
      const Vec7 x = id.col(i), y = id.col(j);
      const Vec7 r = d * mu.bracket(x, y) - mu.bracket(d * x, y) - mu.bracket(x, d * y);
      worst = std::max(worst, r.norm());
    }
  return worst;
}

Mat6 complex_structure_j() {
  Mat6 j = Mat6::Zero();
  for (int p = 0; p < 3; ++p) {
    j(2 * p + 1, 2 * p) = 1.0;
    j(2 * p, 2 * p + 1) = -1.0;
  }
  return j;
}

Mat6 realify(const CMat3& a) {
  Mat6 r;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      const double re = a(p, q).real(), im = a(p, q).imag();
      r(2 * p, 2 * q) = re;
      r(2 * p, 2 * q + 1) = -im;
      r(2 * p + 1, 2 * q) = im;
      r(2 * p + 1, 2 * q + 1) = re;
    }
  return r;
}

AlmostAbelianSpec AlmostAbelianSpec::from_complex(const CMat3& a) {
  AlmostAbelianSpec s;
  s.real_ = realify(a);
  s.supplied_complex_ = true;
  return s;
}

AlmostAbelianSpec AlmostAbelianSpec::from_real(const Mat6& a) {
  if (!a.allFinite()) throw ValidationError("almost-abelian matrix has non-finite entries");
  AlmostAbelianSpec s;
  s.real_ = a;
  return s;
}

std::optional<CMat3> AlmostAbelianSpec::complex(double tol) const {
  const Mat6 j = complex_structure_j();
  const double scale = std::max(1.0, real_.norm());
  if ((real_ * j - j * real_).norm() > tol * scale) return std::nullopt;
  CMat3 c;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) c(p, q) = {real_(2 * p, 2 * q), real_(2 * p + 1, 2 * q)};
  return c;
}

LieBracket mu_from_matrix(const AlmostAbelianSpec& spec) {
  LieBracket mu;
  const Mat6& a = spec.real();
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) mu.set(6, i, k, a(k, i));
  return mu;
}

Mat6 extract_almost_abelian(const LieBracket& mu) {
  Mat6 a;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) a(k, i) = mu(6, i, k);
  return a;
}

ClosednessFlags closedness_criterion(const AlmostAbelianSpec& spec, double tol) {
  const double n = spec.real().norm();
  const Mat6 a = n > 0.0 ? Mat6(spec.real() / n) : spec.real();
  const Mat6 j = complex_structure_j();

  const double commute = (a * j - j * a).norm();
  // For J-linear A the complex trace is (tr A - i tr(JA)) / 2.
  const double ctrace = std::hypot(a.trace(), (j * a).trace()) / 2.0;
  const double skew = (a + a.transpose()).norm();
  const bool closed = commute <= tol && ctrace <= tol;
  const bool tf = closed && skew <= tol;

  const LieBracket mu = mu_from_matrix(AlmostAbelianSpec::from_real(a));
  ClosednessFlags out;
  out.closed = closed;
  out.torsion_free = tf;
  out.dphi_norm = ce_differential(mu, standard_phi()).norm();
  out.dpsi_norm = ce_differential(mu, standard_psi()).norm();

  // Only a decisive disagreement (outside a factor-100 band around tol) counts.
  constexpr double band = 100.0;
  const bool direct_closed = out.dphi_norm <= tol * band;
  const bool direct_open = out.dphi_norm > tol / band;
  if ((closed && !direct_closed) || (!closed && commute + ctrace > tol * band && !direct_open))
    throw InconsistencyError("closedness criterion disagrees with the direct d(phi) test");
  if (closed) {
    const bool direct_tf = out.dpsi_norm <= tol * band;
    const bool direct_ntf = out.dpsi_norm > tol / band;
    if ((tf && !direct_tf) || (!tf && skew > tol * band && !direct_ntf))
      throw InconsistencyError("torsion-free criterion disagrees with the direct d(*phi) test");
  }
  return out;
}

namespace {

SpectralType classify_spectrum(const Eigen::VectorXcd& ev, double scale, bool nilpotent) {
  SpectralType t;
  t.nilpotent = nilpotent;
  if (nilpotent) {
    t.imaginary_type = t.real_type = true;
    return t;
  }
  bool on_axis = true;
  for (const auto& l : ev) {
    const double re = std::abs(l.real());
    if (re > 1e-8 * scale) on_axis = false;
    if (re > 1e-12 * scale && re <= 1e-8 * scale) t.borderline = true;
  }
  t.imaginary_type = on_axis;
  t.real_type = !on_axis;
  return t;
}

bool is_nilpotent_matrix(const Eigen::MatrixXd& a) {
  const double n = a.norm();
  if (n == 0.0) return true;
  const Eigen::MatrixXd u = a / n;
  Eigen::MatrixXd p = u;
  for (Eigen::Index k = 1; k < a.rows(); ++k) p = p * u;
  return p.norm() <= 1e-9;
}

}  // namespace

SpectralType spectral_type(const AlmostAbelianSpec& spec) {
  const Mat6& a = spec.real();
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  Eigen::EigenSolver<Mat6> es(a, false);
  return classify_spectrum(es.eigenvalues(), scale, is_nilpotent_matrix(a));
}

SpectralType spectral_type_sampled(const LieBracket& mu, int samples, std::uint64_t seed) {
  const StructureFlags flags = structure_flags(mu);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  SpectralType t;
  t.exact = false;
  t.nilpotent = flags.nilpotent;
  if (flags.nilpotent) {
    t.imaginary_type = t.real_type = true;
    return t;
  }
  bool all_imag = true, all_real = true;
  for (int s = 0; s < samples; ++s) {
    Vec7 x;
    for (int i = 0; i < kDim; ++i) x(i) = gauss(rng);
    const Mat7 adx = mu.ad(x);
    const double scale = std::max(adx.norm(), std::numeric_limits<double>::min());
    Eigen::EigenSolver<Mat7> es(adx, false);
    const SpectralType st = classify_spectrum(es.eigenvalues(), scale, is_nilpotent_matrix(adx));
    t.borderline = t.borderline || st.borderline;
    if (!st.imaginary_type) all_imag = false;
    if (!st.real_type) all_real = false;
  }
  t.imaginary_type = all_imag;
  t.real_type = all_real;
  return t;
}

}  // namespace g2pinch
