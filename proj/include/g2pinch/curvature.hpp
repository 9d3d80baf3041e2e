#pragma once

#include "g2pinch/liealg.hpp"

#include <array>
#include <optional>

namespace g2pinch {

/// Gamma(i, j, k) = <nabla_{e_i} e_j, e_k> for the left-invariant metric making
/// e_1..e_7 orthonormal.
class Connection {
 public:
  double operator()(int i, int j, int k) const { return g_[(i * kDim + j) * kDim + k]; }
  double& operator()(int i, int j, int k) { return g_[(i * kDim + j) * kDim + k]; }
  /// nabla_{e_i} as a matrix: column j is nabla_{e_i} e_j.
  Mat7 covariant(int i) const;

 private:
  std::array<double, kDim * kDim * kDim> g_{};
};

/// Koszul formula on left-invariant fields.
Connection levi_civita(const LieBracket& mu);

struct RicciData {
  /// Ricci operator in the orthonormal basis.
  Mat7 ric = Mat7::Zero();
  double scal = 0.0;
  double ric_norm2 = 0.0;
};

struct CurvatureData {
  RicciData ricci;
  /// R(e_i, e_j) e_k = sum_l riemann[((i*7 + j)*7 + k)*7 + l] e_l.
  std::array<double, kDim * kDim * kDim * kDim> riemann{};
  double riemann_norm = 0.0;
};

/// Brute force: R(x, y) = [nabla_x, nabla_y] - nabla_[x,y], ric(x, y) = sum_i <R(e_i, x) y, e_i>.
CurvatureData ricci_oracle(const LieBracket& mu);

/// Ric = M - B/2 - S(ad H), the standard formula for left-invariant metrics.
RicciData ricci_closed_form(const LieBracket& mu);

/// ricci_closed_form cross-checked against ricci_oracle; a deviation beyond
/// 1e-9 |mu|^2 throws InconsistencyError.
RicciData ricci_checked(const LieBracket& mu);

struct PinchReport {
  std::optional<double> F;
  bool flat = false;
  RicciData ricci;
  double riemann_norm = 0.0;
  /// Estimates of inf/sup of F over a family, filled in by scans.
  std::optional<double> inf_estimate;
  std::optional<double> sup_estimate;
};

/// F = scal^2 / |Ric|^2. Absent when the metric is flat (|Riemann| <= tol |mu|^2).
PinchReport pinching_F(const LieBracket& mu, double tol = 1e-9);

/// |H(A)|^4 / (|H(A)|^4 + |[A, A*]|^2 / 8) with |B|^2 = tr BB*. Requires A in sl_3(C).
double F_closed_formula(const CMat3& a);

/// (tr S^2)^2 / ((tr S^2)^2 + |[A, A^t]|^2 / 4), S = (A + A^t)/2. Requires tr A = 0.
double F_unimodular_formula(const Mat6& a);

/// 1 + (tr A)^2 / tr S(A)^2, an upper bound for F(mu_A).
double F_riemannian_bound(const Mat6& a);

/// Closed formula when A is in sl_3(C), otherwise the unimodular Riemannian
/// formula when tr A = 0. ValidationError names the failed criterion otherwise.
double F_almost_abelian(const AlmostAbelianSpec& spec, double tol = 1e-9);

/// |Ric - (scal / 7) I| / |Ric|; zero for flat metrics.
double einstein_residual(const LieBracket& mu);

struct RicciSolitonFit {
  double c = 0.0;
  /// Fitted derivation; only its symmetric part enters the residual.
  LinearMap7 d = LinearMap7::Zero();
  /// |Ric - c I - sym(D)| / |Ric|.
  double residual = 0.0;
  double condition_number = 0.0;
  bool rank_deficient = false;
};

/// Least squares over c in R and D in Der(mu).
RicciSolitonFit ricci_soliton_residual(const LieBracket& mu);

struct SolvsolitonCheck {
  bool solvsoliton = false;
  bool normal = false;
  bool nilpotent = false;
  /// The constant in [A, [A, A^t]] = c A for the nilpotent branch.
  std::optional<double> c;
  double proportionality_defect = 0.0;
};

/// A normal, or A nilpotent with [A, [A, A^t]] = c A.
SolvsolitonCheck solvsoliton_check_aa(const AlmostAbelianSpec& spec, double tol = 1e-9);

}  // namespace g2pinch
