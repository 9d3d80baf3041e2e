#pragma once

#include "g2pinch/g2core.hpp"

#include <string>

namespace g2pinch {

enum class SolitonKind { expanding, steady, shrinking, none };

std::string to_string(SolitonKind k);

/// Best algebraic soliton fit Delta phi ~ c phi + theta(D) phi, D in Der(mu).
///
/// Only derivation-generated fields are searched, so a positive residual means
/// "not an algebraic soliton" rather than "not a soliton". The sign of c follows
/// the theta convention of infinitesimal_action().
struct SolitonFit {
  double c = 0.0;
  LinearMap7 d = LinearMap7::Zero();
  /// |Delta phi - c phi - theta(D) phi| / |Delta phi| (0 when Delta phi = 0).
  double residual = 0.0;
  SolitonKind kind = SolitonKind::none;
  double condition_number = 0.0;
  bool rank_deficient = false;
  /// False when phi lies in span{theta(D) phi}, so c is not determined by the fit.
  bool c_identifiable = true;
  /// c divided by |mu|^2, the quantity compared with the steady threshold.
  double c_normalized = 0.0;
};

/// Requires a closed structure (ValidationError otherwise). Forms are compared in
/// the orthonormal frame of phi.
SolitonFit laplacian_soliton_fit(const G2Structure& g, double tol = 1e-8,
                                 double steady_tol = 1e-8);

struct EigenformFit {
  double c = 0.0;
  /// |Delta phi - c phi| / |Delta phi|; c and residual are 0 when Delta phi vanishes
  /// to roundoff (|Delta phi| <= 1e-12 |mu|^2).
  double residual = 0.0;
};

/// c = <Delta phi, phi> / |phi|^2.
EigenformFit eigenform_fit(const G2Structure& g);

}  // namespace g2pinch
