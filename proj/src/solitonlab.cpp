#include "g2pinch/solitonlab.hpp"

#include "g2pinch/errors.hpp"

#include <cmath>

namespace g2pinch {

std::string to_string(SolitonKind k) {
  switch (k) {
    case SolitonKind::expanding: return "expanding";
    case SolitonKind::steady: return "steady";
    case SolitonKind::shrinking: return "shrinking";
    case SolitonKind::none: return "none";
  }
  return "none";
}

SolitonFit laplacian_soliton_fit(const G2Structure& g, double tol, double steady_tol) {
  const OrthonormalFrame f = orthonormal_frame(g);
  const LieBracket& mu = f.in_frame.mu;
  const KForm& phi = f.in_frame.phi;
  const double mu2 = mu.norm2();
  if (ce_differential(mu, phi).norm() > 1e-9 * std::max(std::sqrt(mu2), 1e-300))
    throw ValidationError("laplacian_soliton_fit: structure is not closed");

  const KForm lap = ce_differential(mu, -hodge(ce_differential(mu, hodge(phi))));
  // Below roundoff relative to |mu|^2 the Laplacian is taken to vanish.
  const double lap_norm = lap.norm() > 1e-12 * std::max(mu2, 1e-300) ? lap.norm() : 0.0;
  const DerivationBasis der = derivations(mu);

  const int n = 1 + der.dimension;
  Eigen::MatrixXd design(binomial7(3), n);
  design.col(0) = phi.as_vector();
  for (int m = 0; m < der.dimension; ++m)
    design.col(1 + m) = infinitesimal_action(der.elements[m], phi).as_vector();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd x = svd.solve(lap.as_vector());
  const auto& s = svd.singularValues();
  const Eigen::Index rank = svd.rank();

  SolitonFit fit;
  fit.rank_deficient = rank < n;
  fit.condition_number = rank > 0 ? s(0) / s(rank - 1) : 0.0;
  fit.c = x(0);
  for (int m = 0; m < der.dimension; ++m) fit.d += x(1 + m) * der.elements[m];
  if (lap_norm == 0.0) {
    fit.c = 0.0;
    fit.d.setZero();
    fit.residual = 0.0;
  } else {
    fit.residual = (design * x - lap.as_vector()).norm() / lap_norm;
  }

  // phi is identifiable iff dropping it from the design lowers the rank.
  if (der.dimension > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> rest(design.rightCols(der.dimension));
    rest.setThreshold(1e-10);
    fit.c_identifiable = rest.rank() < rank;
  }

  fit.c_normalized = mu2 > 0.0 ? fit.c / mu2 : 0.0;
  if (fit.residual <= tol) {
    if (std::abs(fit.c_normalized) <= steady_tol)
      fit.kind = SolitonKind::steady;
    else
      fit.kind = fit.c > 0.0 ? SolitonKind::expanding : SolitonKind::shrinking;
  }
  return fit;
}

EigenformFit eigenform_fit(const G2Structure& g) {
  const OrthonormalFrame f = orthonormal_frame(g);
  const KForm& phi = f.in_frame.phi;
  const LieBracket& mu = f.in_frame.mu;
  const KForm lap = ce_differential(mu, -hodge(ce_differential(mu, hodge(phi)))) +
                    hodge(ce_differential(mu, hodge(ce_differential(mu, phi))));
  EigenformFit out;
  if (lap.norm() <= 1e-12 * std::max(mu.norm2(), 1e-300)) return out;
  out.c = form_inner(lap, phi) / phi.norm2();
  out.residual = (lap - out.c * phi).norm() / lap.norm();
  return out;
}

}  // namespace g2pinch
