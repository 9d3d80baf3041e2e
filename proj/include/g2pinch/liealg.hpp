#pragma once

#include "g2pinch/exterior.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace g2pinch {

using CMat3 = Eigen::Matrix3cd;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Antisymmetric structure constants: [e_i, e_j] = sum_k c(i, j, k) e_k, 0-based.
class LieBracket {
 public:
  LieBracket() { c_.fill(0.0); }

  static LieBracket zero() { return {}; }

  double operator()(int i, int j, int k) const { return c_[index(i, j, k)]; }
  /// Sets c(i, j, k) = v and c(j, i, k) = -v. Setting a diagonal entry is an error.
  void set(int i, int j, int k, double v);

  Vec7 bracket(const Vec7& x, const Vec7& y) const;
  /// ad e_i, as a matrix: column j is [e_i, e_j].
  Mat7 ad(int i) const;
  Mat7 ad(const Vec7& x) const;

  /// Sum of c(i, j, k)^2 over i < j.
  double norm2() const;
  double norm() const;

  LieBracket scaled(double s) const;
  /// h.mu = h mu(h^{-1} ., h^{-1} .); h must be invertible.
  LieBracket transformed(const LinearMap7& h) const;

  bool has_nan() const;

 private:
  static constexpr int index(int i, int j, int k) { return (i * kDim + j) * kDim + k; }
  std::array<double, kDim * kDim * kDim> c_;
};

/// Frobenius norm of the Jacobiator over all basis triples.
double jacobi_residual(const LieBracket& mu);

struct StructureFlags {
  bool solvable = false;
  bool nilpotent = false;
  bool unimodular = false;
  std::vector<int> derived_dims;
  std::vector<int> lower_central_dims;
};

/// Rank-based derived and lower central series. Throws ValidationError on non-Lie input.
StructureFlags structure_flags(const LieBracket& mu, double tol = 1e-9);

/// Chevalley-Eilenberg differential, with (d alpha)(x, y) = -alpha([x, y]) on 1-forms.
KForm ce_differential(const LieBracket& mu, const KForm& a);

struct DerivationBasis {
  /// Orthonormal (Frobenius) basis of Der(mu).
  std::vector<LinearMap7> elements;
  int dimension = 0;
  /// Singular values of the derivation system, descending.
  Eigen::VectorXd singular_values;
  /// Ratio between the smallest kept and the largest discarded singular value.
  double threshold_gap = 0.0;
  /// Set when threshold_gap < 10.
  bool ill_conditioned = false;
};

/// Matrix of D -> (D[e_i,e_j] - [D e_i, e_j] - [e_i, D e_j]) over i < j, acting on
/// the column-major vectorization of D.
Eigen::MatrixXd derivation_system(const LieBracket& mu);

/// Nullspace of derivation_system() by SVD, threshold 1e-8 times the largest singular value.
DerivationBasis derivations(const LieBracket& mu);

/// Max over basis pairs of |D[e_i,e_j] - [D e_i, e_j] - [e_i, D e_j]|.
double derivation_defect(const LieBracket& mu, const LinearMap7& d);

/// The 6x6 real matrix of the complex structure J e_1 = e_2, J e_3 = e_4, J e_5 = e_6.
Mat6 complex_structure_j();

/// Complex entry a + bi at (p, q) becomes the block [[a, -b], [b, a]].
Mat6 realify(const CMat3& a);

/// Generator of an almost-abelian bracket, supplied either as a complex 3x3 or a
/// real 6x6 matrix.
class AlmostAbelianSpec {
 public:
  static AlmostAbelianSpec from_complex(const CMat3& a);
  static AlmostAbelianSpec from_real(const Mat6& a);

  const Mat6& real() const { return real_; }
  /// The complex form, if the real matrix commutes with J (within tol).
  std::optional<CMat3> complex(double tol = 1e-12) const;
  bool supplied_as_complex() const { return supplied_complex_; }

 private:
  Mat6 real_ = Mat6::Zero();
  bool supplied_complex_ = false;
};

/// c(7, i, .) = A e_i for i <= 6; n = span{e_1..e_6} abelian.
LieBracket mu_from_matrix(const AlmostAbelianSpec& spec);

/// ad e_7 restricted to span{e_1..e_6}.
Mat6 extract_almost_abelian(const LieBracket& mu);

struct ClosednessFlags {
  bool closed = false;
  bool torsion_free = false;
  /// |d phi| and |d *phi| for mu_A with |mu_A| normalized to 1.
  double dphi_norm = 0.0;
  double dpsi_norm = 0.0;
};

/// A in sl_3(C) (closed) and A in su(3) (torsion-free), cross-checked against the
/// differentials of phi and *phi. Disagreement throws InconsistencyError.
ClosednessFlags closedness_criterion(const AlmostAbelianSpec& spec, double tol = 1e-9);

struct SpectralType {
  bool imaginary_type = false;
  bool real_type = false;
  bool nilpotent = false;
  /// Some eigenvalue sits so close to the imaginary axis that the answer is tolerance-driven.
  bool borderline = false;
  /// False for the sampled estimate on general brackets.
  bool exact = true;
};

/// Exact for almost-abelian brackets: spectrum of A.
SpectralType spectral_type(const AlmostAbelianSpec& spec);

/// Heuristic for general brackets: spectra of ad X over random X (fixed seed).
SpectralType spectral_type_sampled(const LieBracket& mu, int samples = 64,
                                   std::uint64_t seed = 12345);

}  // namespace g2pinch
