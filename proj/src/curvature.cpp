#include "g2pinch/curvature.hpp"

#include "g2pinch/errors.hpp"

#include <cmath>
#include <sstream>

namespace g2pinch {

namespace {

RicciData finish(const Mat7& ric) {
  RicciData r;
  r.ric = 0.5 * (ric + ric.transpose());
  r.scal = r.ric.trace();
  r.ric_norm2 = r.ric.squaredNorm();
  return r;
}

bool is_nilpotent(const Mat6& a) {
  const double n = a.norm();
  if (n == 0.0) return true;
  const Mat6 u = a / n;
  Mat6 p = u;
  for (int k = 1; k < 6; ++k) p = p * u;
  return p.norm() <= 1e-9;
}

}  // namespace

Mat7 Connection::covariant(int i) const {
  Mat7 m;
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) m(k, j) = (*this)(i, j, k);
  return m;
}

Connection levi_civita(const LieBracket& mu) {
  Connection g;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        g(i, j, k) = 0.5 * (mu(i, j, k) - mu(j, k, i) + mu(k, i, j));
  return g;
}

CurvatureData ricci_oracle(const LieBracket& mu) {
  const Connection conn = levi_civita(mu);
  std::array<Mat7, kDim> nabla;
  for (int i = 0; i < kDim; ++i) nabla[i] = conn.covariant(i);

  CurvatureData out;
  Mat7 ric = Mat7::Zero();
  double rn2 = 0.0;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) {
      Mat7 r = nabla[i] * nabla[j] - nabla[j] * nabla[i];
      for (int l = 0; l < kDim; ++l) r -= mu(i, j, l) * nabla[l];
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) out.riemann[((i * kDim + j) * kDim + k) * kDim + l] = r(l, k);
      rn2 += r.squaredNorm();
      // ric(a, b) = sum_i <R(e_i, e_a) e_b, e_i>
      for (int b = 0; b < kDim; ++b) ric(j, b) += r(i, b);
    }
  }
  out.riemann_norm = std::sqrt(rn2);
  out.ricci = finish(ric);
  return out;
}

RicciData ricci_closed_form(const LieBracket& mu) {
  std::array<Mat7, kDim> ad;
  for (int i = 0; i < kDim; ++i) ad[i] = mu.ad(i);

  Mat7 m = Mat7::Zero();
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      double s = 0.0;
      // -1/2 sum_i <[e_a, e_i], [e_b, e_i]>
      for (int i = 0; i < kDim; ++i) s -= 0.5 * ad[a].col(i).dot(ad[b].col(i));
      // +1/4 sum_{i,j} <[e_i, e_j], e_a> <[e_i, e_j], e_b>
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) s += 0.25 * mu(i, j, a) * mu(i, j, b);
      m(a, b) = s;
    }

  Mat7 killing;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) killing(a, b) = (ad[a] * ad[b]).trace();

  Vec7 h;
  for (int a = 0; a < kDim; ++a) h(a) = ad[a].trace();
  const Mat7 adh = mu.ad(h);

  return finish(m - 0.5 * killing - 0.5 * (adh + adh.transpose()));
}

RicciData ricci_checked(const LieBracket& mu) {
  const RicciData fast = ricci_closed_form(mu);
  const RicciData slow = ricci_oracle(mu).ricci;
  const double dev = (fast.ric - slow.ric).cwiseAbs().maxCoeff();
  if (dev > 1e-9 * std::max(1.0, mu.norm2())) {
    std::ostringstream msg;
    msg << "Ricci closed form deviates from the Koszul oracle by " << dev;
    throw InconsistencyError(msg.str());
  }
  return fast;
}

PinchReport pinching_F(const LieBracket& mu, double tol) {
  const CurvatureData curv = ricci_oracle(mu);
  const RicciData fast = ricci_closed_form(mu);
  const double dev = (fast.ric - curv.ricci.ric).cwiseAbs().maxCoeff();
  if (dev > 1e-9 * std::max(1.0, mu.norm2()))
    throw InconsistencyError("Ricci closed form deviates from the Koszul oracle");

  PinchReport rep;
  rep.ricci = curv.ricci;
  rep.riemann_norm = curv.riemann_norm;
  rep.flat = curv.riemann_norm <= tol * mu.norm2() || mu.norm2() == 0.0;
  if (!rep.flat && rep.ricci.ric_norm2 > 0.0)
    rep.F = rep.ricci.scal * rep.ricci.scal / rep.ricci.ric_norm2;
  return rep;
}

double F_closed_formula(const CMat3& a) {
  const double scale = std::max(1.0, a.norm());
  if (std::abs(a.trace()) > 1e-9 * scale)
    throw ValidationError("closed F formula needs A in sl_3(C): complex trace is nonzero");
  const CMat3 astar = a.adjoint();
  const CMat3 herm = 0.5 * (a + astar);
  const double h2 = (herm * herm.adjoint()).trace().real();
  const CMat3 comm = a * astar - astar * a;
  const double c2 = (comm * comm.adjoint()).trace().real();
  if (h2 <= 0.0) throw ValidationError("F is undefined: A is skew-hermitian (torsion-free, flat)");
  const double h4 = h2 * h2;
  return h4 / (h4 + c2 / 8.0);
}

double F_unimodular_formula(const Mat6& a) {
  const double scale = std::max(1.0, a.norm());
  if (std::abs(a.trace()) > 1e-9 * scale)
    throw ValidationError("unimodular F formula needs tr A = 0");
  const Mat6 s = 0.5 * (a + a.transpose());
  const double s2 = (s * s).trace();
  if (s2 <= 0.0) throw ValidationError("F is undefined: A is skew-symmetric (flat)");
  const Mat6 comm = a * a.transpose() - a.transpose() * a;
  return s2 * s2 / (s2 * s2 + comm.squaredNorm() / 4.0);
}

double F_riemannian_bound(const Mat6& a) {
  const Mat6 s = 0.5 * (a + a.transpose());
  const double s2 = (s * s).trace();
  if (s2 <= 0.0) throw ValidationError("Riemannian F bound is undefined: S(A) = 0");
  return 1.0 + a.trace() * a.trace() / s2;
}

double F_almost_abelian(const AlmostAbelianSpec& spec, double tol) {
  const double scale = std::max(1.0, spec.real().norm());
  if (const auto c = spec.complex(tol * scale); c && std::abs(c->trace()) <= tol * scale)
    return F_closed_formula(*c);
  if (std::abs(spec.real().trace()) <= tol * scale) return F_unimodular_formula(spec.real());
  throw ValidationError(
      "no closed formula: A is not in sl_3(C) (J-commutation or complex trace fails) and tr A != 0");
}

double einstein_residual(const LieBracket& mu) {
  const RicciData r = ricci_checked(mu);
  if (r.ric_norm2 == 0.0) return 0.0;
  return (r.ric - (r.scal / kDim) * Mat7::Identity()).norm() / std::sqrt(r.ric_norm2);
}

RicciSolitonFit ricci_soliton_residual(const LieBracket& mu) {
  const RicciData r = ricci_checked(mu);
  const DerivationBasis der = derivations(mu);

  const int n = 1 + der.dimension;
  Eigen::MatrixXd design(kDim * kDim, n);
  design.col(0) = Eigen::Map<const Eigen::VectorXd>(Mat7::Identity().eval().data(), kDim * kDim);
  for (int m = 0; m < der.dimension; ++m) {
    const Mat7 sym = 0.5 * (der.elements[m] + der.elements[m].transpose());
    design.col(1 + m) = Eigen::Map<const Eigen::VectorXd>(sym.data(), kDim * kDim);
  }
  const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(r.ric.data(), kDim * kDim);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  svd.setThreshold(1e-10);
  const Eigen::VectorXd x = svd.solve(target);

  RicciSolitonFit fit;
  Eigen::Index rank = svd.rank();
  fit.rank_deficient = rank < n;
  fit.condition_number = rank > 0 ? s(0) / s(rank - 1) : 0.0;
  fit.c = x(0);
  for (int m = 0; m < der.dimension; ++m) fit.d += x(1 + m) * der.elements[m];
  const double rn = std::sqrt(r.ric_norm2);
  fit.residual = rn > 0.0 ? (design * x - target).norm() / rn : 0.0;
  return fit;
}

SolvsolitonCheck solvsoliton_check_aa(const AlmostAbelianSpec& spec, double tol) {
  const Mat6& a = spec.real();
  SolvsolitonCheck out;
  const double n = a.norm();
  if (n == 0.0) {
    out.normal = out.nilpotent = out.solvsoliton = true;
    return out;
  }
  const Mat6 u = a / n;
  const Mat6 comm = u * u.transpose() - u.transpose() * u;
  out.normal = comm.norm() <= tol;
  out.nilpotent = is_nilpotent(a);
  if (out.nilpotent) {
    const Mat6 nested = u * comm - comm * u;
    const double c = (nested.cwiseProduct(u)).sum();  // <N, u> with |u| = 1
    out.proportionality_defect = (nested - c * u).norm();
    // [A,[A,A^t]] is cubic in A.
    out.c = c * n * n;
    if (out.proportionality_defect <= tol) out.solvsoliton = true;
  }
  if (out.normal) out.solvsoliton = true;
  return out;
}

}  // namespace g2pinch
