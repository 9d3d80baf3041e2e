#include "g2pinch/exterior.hpp"

#include "g2pinch/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace g2pinch {

namespace {

struct MaskTables {
  std::array<std::vector<IndexMask>, kDim + 1> by_degree;
  std::array<int, 1 << kDim> position{};

  MaskTables() {
    // Lexicographic order on increasing tuples, generated by recursion on the
    // smallest index.
    for (int k = 0; k <= kDim; ++k) {
      std::vector<IndexMask>& out = by_degree[k];
      std::array<int, kDim> idx{};
      auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == k) {
          IndexMask m = 0;
          for (int d = 0; d < k; ++d) m |= static_cast<IndexMask>(1u << idx[d]);
          out.push_back(m);
          return;
        }
        for (int i = start; i < kDim; ++i) {
          idx[depth] = i;
          self(self, i + 1, depth + 1);
        }
      };
      rec(rec, 0, 0);
      for (std::size_t p = 0; p < out.size(); ++p) position[out[p]] = static_cast<int>(p);
    }
  }
};

const MaskTables& tables() {
  static const MaskTables t;
  return t;
}

int popcount(unsigned m) { return std::popcount(m); }

// Sign of the shuffle that sorts the concatenation (I, J) for disjoint I, J:
// (-1)^{#{(i, j) : i in I, j in J, i > j}}.
double merge_sign(IndexMask left, IndexMask right) {
  int inversions = 0;
  for (int j = 0; j < kDim; ++j) {
    if (right & (1u << j)) {
      inversions += popcount(left & ~((2u << j) - 1u));
    }
  }
  return (inversions & 1) ? -1.0 : 1.0;
}

int count_below(IndexMask m, int j) { return popcount(m & ((1u << j) - 1u)); }

std::vector<int> indices_of(IndexMask m) {
  std::vector<int> out;
  for (int i = 0; i < kDim; ++i)
    if (m & (1u << i)) out.push_back(i);
  return out;
}

void require_finite(const KForm& a, const char* where) {
  if (a.has_nan()) throw ValidationError(std::string(where) + ": NaN coefficient in input form");
}

}  // namespace

int binomial7(int k) {
  if (k < 0 || k > kDim) return 0;
  return static_cast<int>(tables().by_degree[k].size());
}

std::span<const IndexMask> masks_of_degree(int k) {
  if (k < 0 || k > kDim) throw ValidationError("form degree out of range 0..7");
  return tables().by_degree[k];
}

int mask_position(IndexMask mask) { return tables().position[mask & 0x7f]; }

KForm::KForm(int degree) : degree_(degree) {
  if (degree < 0 || degree > kDim) throw ValidationError("form degree out of range 0..7");
  coeffs_.assign(static_cast<std::size_t>(binomial7(degree)), 0.0);
}

KForm KForm::basis(std::initializer_list<int> indices) {
  KForm out(static_cast<int>(indices.size()));
  std::vector<int> idx(indices);
  for (int i : idx)
    if (i < 1 || i > kDim) throw ValidationError("basis index out of range 1..7");
  // Bubble sort, tracking the permutation parity.
  double sign = 1.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b + 1 < idx.size() - a; ++b) {
      if (idx[b] == idx[b + 1]) return out;
      if (idx[b] > idx[b + 1]) {
        std::swap(idx[b], idx[b + 1]);
        sign = -sign;
      }
    }
  }
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) return out;
  IndexMask m = 0;
  for (int i : idx) m |= static_cast<IndexMask>(1u << (i - 1));
  out.coeff(m) = sign;
  return out;
}

KForm KForm::scalar(double value) {
  KForm out(0);
  out[0] = value;
  return out;
}

KForm KForm::from_vector(int degree, const Eigen::Ref<const Eigen::VectorXd>& v) {
  KForm out(degree);
  if (static_cast<std::size_t>(v.size()) != out.size())
    throw ValidationError("coefficient vector has the wrong length for this degree");
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = v(static_cast<Eigen::Index>(p));
  return out;
}

double KForm::norm2() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return s;
}

double KForm::norm() const { return std::sqrt(norm2()); }

double KForm::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool KForm::has_nan() const {
  return std::any_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isnan(c); });
}

KForm& KForm::operator+=(const KForm& other) {
  if (other.degree_ != degree_) throw ValidationError("adding forms of different degree");
  for (std::size_t p = 0; p < coeffs_.size(); ++p) coeffs_[p] += other.coeffs_[p];
  return *this;
}

KForm& KForm::operator-=(const KForm& other) {
  if (other.degree_ != degree_) throw ValidationError("subtracting forms of different degree");
  for (std::size_t p = 0; p < coeffs_.size(); ++p) coeffs_[p] -= other.coeffs_[p];
  return *this;
}

KForm& KForm::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

bool approx_equal(const KForm& a, const KForm& b, double tol) {
  if (a.degree() != b.degree()) return false;
  for (std::size_t p = 0; p < a.size(); ++p)
    if (!(std::abs(a[p] - b[p]) <= tol)) return false;
  return true;
}

KForm volume_form() { return KForm::basis({1, 2, 3, 4, 5, 6, 7}); }

WedgeResult wedge_checked(const KForm& a, const KForm& b) {
  require_finite(a, "wedge");
  require_finite(b, "wedge");
  const int deg = a.degree() + b.degree();
  if (deg > kDim) return {KForm(kDim), true};
  KForm out(deg);
  const auto ma = masks_of_degree(a.degree());
  const auto mb = masks_of_degree(b.degree());
  for (std::size_t p = 0; p < ma.size(); ++p) {
    if (a[p] == 0.0) continue;
    for (std::size_t q = 0; q < mb.size(); ++q) {
      if (b[q] == 0.0 || (ma[p] & mb[q])) continue;
      out.coeff(static_cast<IndexMask>(ma[p] | mb[q])) += merge_sign(ma[p], mb[q]) * a[p] * b[q];
    }
  }
  return {std::move(out), false};
}

KForm wedge(const KForm& a, const KForm& b) { return wedge_checked(a, b).form; }

KForm hodge(const KForm& a) {
  KForm out(kDim - a.degree());
  const auto ma = masks_of_degree(a.degree());
  for (std::size_t p = 0; p < ma.size(); ++p) {
    const auto comp = static_cast<IndexMask>(~ma[p] & 0x7f);
    out.coeff(comp) = merge_sign(ma[p], comp) * a[p];
  }
  return out;
}

double form_inner(const KForm& a, const KForm& b) {
  if (a.degree() != b.degree()) throw ValidationError("form_inner: degree mismatch");
  return a.as_vector().dot(b.as_vector());
}

KForm interior(const Vec7& x, const KForm& a) {
  if (a.degree() == 0) return KForm(0);
  KForm out(a.degree() - 1);
  const auto ma = masks_of_degree(a.degree());
  for (std::size_t p = 0; p < ma.size(); ++p) {
    if (a[p] == 0.0) continue;
    for (int i : indices_of(ma[p])) {
      const double sign = (count_below(ma[p], i) & 1) ? -1.0 : 1.0;
      out.coeff(static_cast<IndexMask>(ma[p] & ~(1u << i))) += sign * x(i) * a[p];
    }
  }
  return out;
}

KForm gl_pullback(const LinearMap7& h, const KForm& a, PullbackConvention convention) {
  Mat7 m = h;
  if (convention == PullbackConvention::inverse) {
    Eigen::FullPivLU<Mat7> lu(h);
    if (!lu.isInvertible()) throw ValidationError("gl_pullback: singular map with inverse action");
    m = lu.inverse();
  }
  const int k = a.degree();
  KForm out(k);
  if (k == 0) {
    out[0] = a[0];
    return out;
  }
  const auto masks = masks_of_degree(k);
  std::vector<std::vector<int>> idx;
  idx.reserve(masks.size());
  for (IndexMask mk : masks) idx.push_back(indices_of(mk));
  Eigen::MatrixXd minor(k, k);
  // (h^* e^I)_J = det h[I, J].
  for (std::size_t p = 0; p < masks.size(); ++p) {
    if (a[p] == 0.0) continue;
    for (std::size_t q = 0; q < masks.size(); ++q) {
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) minor(r, c) = m(idx[p][r], idx[q][c]);
      out[q] += a[p] * minor.determinant();
    }
  }
  return out;
}

KForm derivation_extension(const Mat7& m, const KForm& a) {
  KForm out(a.degree());
  const auto masks = masks_of_degree(a.degree());
  for (std::size_t p = 0; p < masks.size(); ++p) {
    if (a[p] == 0.0) continue;
    const IndexMask mask = masks[p];
    for (int i : indices_of(mask)) {
      const auto rest = static_cast<IndexMask>(mask & ~(1u << i));
      const int pos = count_below(mask, i);
      for (int j = 0; j < kDim; ++j) {
        if (m(i, j) == 0.0 || (rest & (1u << j))) continue;
        const int parity = pos + count_below(rest, j);
        const double sign = (parity & 1) ? -1.0 : 1.0;
        out.coeff(static_cast<IndexMask>(rest | (1u << j))) += sign * m(i, j) * a[p];
      }
    }
  }
  return out;
}

KForm infinitesimal_action(const LinearMap7& d, const KForm& a) {
  return -derivation_extension(d, a);
}

}  // namespace g2pinch
