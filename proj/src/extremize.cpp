#include "g2pinch/curvature.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/families.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <limits>

namespace g2pinch {

namespace {

using cd = std::complex<double>;
using Grad = Eigen::Matrix<double, 16, 1>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Orthonormal (real inner product Re tr XY*) basis of sl_3(C) as a real space.
const std::array<CMat3, 16>& sl3c_basis() {
  static const std::array<CMat3, 16> basis = [] {
    std::array<CMat3, 16> b;
    int n = 0;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        if (p == q) continue;
        CMat3 e = CMat3::Zero();
        e(p, q) = 1.0;
        b[n++] = e;
        b[n++] = cd(0, 1) * e;
      }
    CMat3 h1 = CMat3::Zero(), h2 = CMat3::Zero();
    h1.diagonal() << 1.0, -1.0, 0.0;
    h2.diagonal() << 1.0, 1.0, -2.0;
    h1 /= std::sqrt(2.0);
    h2 /= std::sqrt(6.0);
    b[n++] = h1;
    b[n++] = cd(0, 1) * h1;
    b[n++] = h2;
    b[n++] = cd(0, 1) * h2;
    return b;
  }();
  return basis;
}

CMat3 algebra_element(const Grad& x) {
  CMat3 m = CMat3::Zero();
  for (int k = 0; k < 16; ++k) m += x(k) * sl3c_basis()[k];
  return m;
}

CMat3 conjugate(const CMat3& a, const CMat3& x) {
  const CMat3 g = x.exp();
  const CMat3 gi = (-x).exp();
  return g * a * gi;
}

CMat3 normalized(const CMat3& a) { return a / a.norm(); }

}  // namespace

Grad orbit_gradient(const CMat3& a, double step) {
  Grad g;
  for (int k = 0; k < 16; ++k) {
    const CMat3 x = step * sl3c_basis()[k];
    g(k) = (F_closed_formula(conjugate(a, x)) - F_closed_formula(conjugate(a, -x))) / (2.0 * step);
  }
  return g;
}

ExtremizeResult extremize_F(const AlmostAbelianSpec& start, Direction dir,
                            const ExtremizeOptions& options) {
  const double scale = std::max(1.0, start.real().norm());
  const auto c = start.complex(1e-9 * scale);
  if (!c || std::abs(c->trace()) > 1e-9 * scale)
    throw ValidationError("extremize needs a closed start: A must lie in sl_3(C)");
  if (c->norm() == 0.0) throw ValidationError("extremize needs A != 0");

  const double sign = dir == Direction::max ? 1.0 : -1.0;
  ExtremizeResult r;
  r.a = normalized(*c);
  r.F = F_closed_formula(r.a);
  r.trace.push_back(r.F);

  double step = 1.0;
  int stalled = 0;
  for (; r.iterations < options.max_iterations; ++r.iterations) {
    const Grad g = orbit_gradient(r.a, options.fd_step);
    r.grad_norm = g.norm();
    if (r.grad_norm <= options.grad_tol) {
      r.converged = true;
      break;
    }

    // Armijo backtracking along +-grad.
    bool accepted = false;
    CMat3 next;
    double f_next = r.F;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      next = normalized(conjugate(r.a, algebra_element(sign * step * g)));
      f_next = F_closed_formula(next);
      if (sign * (f_next - r.F) >= 1e-4 * step * r.grad_norm * r.grad_norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Near a critical point the Armijo gain drops below the resolution of F;
      // accept instead any non-worsening step that shrinks the gradient.
      step = 1.0;
      for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
        next = normalized(conjugate(r.a, algebra_element(sign * step * g)));
        f_next = F_closed_formula(next);
        accepted = sign * (f_next - r.F) >= -4.0 * kEps * std::abs(r.F) &&
                   orbit_gradient(next, options.fd_step).norm() < r.grad_norm;
        if (accepted) break;
      }
      if (!accepted) break;
    }

    const double moved = (next - r.a).norm();
    stalled = (std::abs(f_next - r.F) < 1e-12 && moved > 1e-6) ? stalled + 1 : 0;
    r.a = next;
    r.F = f_next;
    r.trace.push_back(r.F);
    step = std::min(2.0 * step, 1e3);
    if (stalled >= 50) {
      r.escapes_to_degeneration = true;
      ++r.iterations;
      break;
    }
  }
  if (!r.converged && r.iterations >= options.max_iterations) {
    r.grad_norm = orbit_gradient(r.a, options.fd_step).norm();
    r.converged = r.grad_norm <= options.grad_tol;
  }
  return r;
}

}  // namespace g2pinch
