#pragma once

#include "g2pinch/exterior.hpp"
#include "g2pinch/liealg.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace g2pinch {

/// e^{127} + e^{347} + e^{567} + e^{135} - e^{146} - e^{236} - e^{245}
const KForm& standard_phi();
/// *phi for the identity metric.
const KForm& standard_psi();

/// Left-invariant G2-structure: a Lie bracket together with a positive 3-form.
/// Quantities that need the metric are computed in an orthonormal frame of the
/// metric induced by phi; forms are returned in the original basis.
struct G2Structure {
  LieBracket mu;
  KForm phi = standard_phi();

  static G2Structure standard(const LieBracket& mu) { return {mu, standard_phi()}; }
};

struct InducedMetric {
  Mat7 metric;
  double volume = 1.0;
};

/// B(x, y) vol_0 = (1/6) i_x s ^ i_y s ^ s, g = det(B)^{-1/9} B, volume = sqrt(det g).
/// Throws ValidationError if sigma is not a positive 3-form.
InducedMetric metric_from_threeform(const KForm& sigma);

/// Basis change to a g(phi)-orthonormal frame f_a = P e_a with P = g^{-1/2}.
struct OrthonormalFrame {
  Mat7 p;
  Mat7 p_inv;
  /// Bracket and 3-form expressed in the frame; phi there has the identity metric.
  G2Structure in_frame;

  /// Frame coordinates back to the original basis.
  KForm to_original(const KForm& frame_form) const;
};

OrthonormalFrame orthonormal_frame(const G2Structure& g);

/// |d phi| with mu normalized to |mu| = 1 and phi to its own metric.
double closedness_defect(const G2Structure& g);

struct TorsionTwoForm {
  KForm tau{2};
  bool closed = true;
  /// |d *phi - tau ^ phi|.
  double coclosure_defect = 0.0;
  /// |*(phi ^ tau) + tau|.
  double lambda14_defect = 0.0;
};

/// tau = -* d *phi. A non-closed structure is an error unless allow_nonclosed is
/// set, in which case the full coclosure defect is returned with closed = false.
TorsionTwoForm torsion_two_form(const G2Structure& g, bool allow_nonclosed = false,
                                double tol = 1e-9);

enum class LaplacianRoute {
  /// d tau, valid for closed structures.
  fast,
  /// (d delta + delta d) phi with delta = (-1)^k * d * on k-forms.
  general,
};

KForm laplacian_phi(const G2Structure& g, LaplacianRoute route = LaplacianRoute::general);

/// Torsion forms of d phi = t0 *phi + 3 t1 ^ phi + *t3 and
/// d *phi = 4 t1 ^ *phi + t2 ^ phi, with t2 in Lambda^2_14 and t3 in Lambda^3_27.
struct TorsionTuple {
  double tau0 = 0.0;
  KForm tau1{1};
  KForm tau2{2};
  KForm tau3{3};
  double dphi_residual = 0.0;
  double dpsi_residual = 0.0;
  /// Difference between the tau1 estimates from the two equations separately.
  double tau1_mismatch = 0.0;
};

/// Stacked least squares over (t0, t1, t2, t3). Throws InconsistencyError if the
/// reconstruction residual exceeds 1e-6 (relative to |mu|). Forms are in the
/// orthonormal frame of g.
TorsionTuple torsion_forms(const G2Structure& g);

/// Orthonormal bases of the G2-irreducible pieces used by the decomposition.
const Eigen::MatrixXd& lambda2_14_basis();
const Eigen::MatrixXd& lambda2_7_basis();
const Eigen::MatrixXd& lambda3_27_basis();

enum class G2Class {
  P, C, CC, LCP, LCC, NP, LCNP, ST, LCB, EF, E, LS, RS,
};

inline constexpr int kG2ClassCount = 13;

std::string to_string(G2Class c);

struct ClassFlags {
  std::array<bool, kG2ClassCount> bits{};

  bool has(G2Class c) const { return bits[static_cast<int>(c)]; }
  void set(G2Class c, bool v = true) { bits[static_cast<int>(c)] = v; }
  std::vector<std::string> names() const;
  bool operator==(const ClassFlags&) const = default;
};

/// Arrows of the inclusion diagram among the special classes.
const std::vector<std::pair<G2Class, G2Class>>& class_implications();

/// Adds every class implied by the ones already set.
ClassFlags close_under_implications(ClassFlags flags);

/// Flags that need curvature or soliton fits; unset entries are treated as false.
struct DelegatedFlags {
  std::optional<bool> einstein;
  std::optional<bool> ricci_soliton;
  std::optional<bool> laplacian_soliton;
};

/// Class flags from the vanishing pattern of the torsion forms and the
/// eigenform fit, computed after normalizing |mu| = 1.
ClassFlags classify(const G2Structure& g, const DelegatedFlags& delegated = {},
                    double tol = 1e-9);

struct ErpResult {
  /// tau = 0; the identity holds with both sides zero.
  bool trivially_satisfied = false;
  /// |d tau - |tau|^2 phi / 6 - *(tau ^ tau) / 6| / |tau|^2.
  double residual = 0.0;
};

/// Requires a closed structure (ValidationError otherwise).
ErpResult erp_residual(const G2Structure& g, double tol = 1e-9);

}  // namespace g2pinch
