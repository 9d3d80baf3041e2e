#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace g2pinch {

inline constexpr int kDim = 7;

using Vec7 = Eigen::Matrix<double, kDim, 1>;
using Mat7 = Eigen::Matrix<double, kDim, kDim>;
/// Linear endomorphism of R^7 in the basis e_1..e_7; column j is the image of e_j.
using LinearMap7 = Mat7;

/// Bit mask over {0..6}; bit i set means e^{i+1} is a factor.
using IndexMask = std::uint8_t;

/// Number of strictly increasing k-tuples in {1..7}.
int binomial7(int k);

/// Masks of degree k, ordered lexicographically by their increasing index tuples.
std::span<const IndexMask> masks_of_degree(int k);

/// Position of a mask inside masks_of_degree(popcount(mask)).
int mask_position(IndexMask mask);

/// Alternating k-form on R^7 with the orthonormal basis e^I, I strictly increasing.
///
/// Storage is dense over all C(7,k) tuples, in the order of masks_of_degree(k).
class KForm {
 public:
  KForm() : KForm(0) {}
  explicit KForm(int degree);

  /// e^{i_1 ... i_k} with 1-based indices. Unsorted input is reordered with the
  /// permutation sign; repeated indices give the zero form.
  static KForm basis(std::initializer_list<int> indices);
  static KForm scalar(double value);

  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  double& operator[](std::size_t pos) { return coeffs_[pos]; }
  double operator[](std::size_t pos) const { return coeffs_[pos]; }

  double coeff(IndexMask mask) const { return coeffs_[mask_position(mask)]; }
  double& coeff(IndexMask mask) { return coeffs_[mask_position(mask)]; }

  double norm() const;
  double norm2() const;
  double max_abs() const;
  bool has_nan() const;
  bool is_zero(double tol = 1e-9) const { return max_abs() <= tol; }

  Eigen::Map<const Eigen::VectorXd> as_vector() const {
    return {coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size())};
  }
  static KForm from_vector(int degree, const Eigen::Ref<const Eigen::VectorXd>& v);

  KForm& operator+=(const KForm& other);
  KForm& operator-=(const KForm& other);
  KForm& operator*=(double s);

  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator-(KForm a) { return a *= -1.0; }
  friend KForm operator*(double s, KForm a) { return a *= s; }
  friend KForm operator*(KForm a, double s) { return a *= s; }

 private:
  int degree_;
  std::vector<double> coeffs_;
};

/// Degree and all coefficients agree within an absolute tolerance.
bool approx_equal(const KForm& a, const KForm& b, double tol = 1e-9);

/// Top-degree volume form e^{1234567}; fixes the orientation.
KForm volume_form();

struct WedgeResult {
  KForm form;
  bool vanishes_by_degree = false;
};

/// Exterior product. deg a + deg b > 7 yields the zero 7-form.
KForm wedge(const KForm& a, const KForm& b);
/// Same as wedge() but reports whether the product vanished for degree reasons.
WedgeResult wedge_checked(const KForm& a, const KForm& b);

/// Hodge star for the identity metric and orientation e^{1234567}.
KForm hodge(const KForm& a);

/// Inner product in which the e^I are orthonormal.
double form_inner(const KForm& a, const KForm& b);

/// Contraction i_x a; degree-0 input gives the zero 0-form.
KForm interior(const Vec7& x, const KForm& a);

enum class PullbackConvention {
  /// (h*a)(v_1, ..., v_k) = a(h v_1, ..., h v_k). A right action.
  raw,
  /// (h.a)(v_1, ..., v_k) = a(h^{-1} v_1, ..., h^{-1} v_k). A left action.
  inverse,
};

/// GL_7 action on forms. The inverse convention requires h invertible.
KForm gl_pullback(const LinearMap7& h, const KForm& a,
                  PullbackConvention convention = PullbackConvention::raw);

/// Extends an endomorphism M of R^7 to forms as the derivation
/// e^{i_1..i_k} -> sum_m e^{i_1} ^ .. ^ (e^{i_m} o M) ^ .. ^ e^{i_k}.
KForm derivation_extension(const Mat7& m, const KForm& a);

/// theta(D) a = d/dt|_0 exp(tD).a under the inverse convention.
KForm infinitesimal_action(const LinearMap7& d, const KForm& a);

}  // namespace g2pinch
