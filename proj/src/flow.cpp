#include "g2pinch/curvature.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/families.hpp"

#include <cmath>

namespace g2pinch {

namespace {

std::optional<KForm> rk4_step(const LieBracket& mu, const KForm& phi, double dt) {
  try {
    const KForm k1 = laplacian_phi({mu, phi});
    const KForm k2 = laplacian_phi({mu, phi + (0.5 * dt) * k1});
    const KForm k3 = laplacian_phi({mu, phi + (0.5 * dt) * k2});
    const KForm k4 = laplacian_phi({mu, phi + dt * k3});
    return phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  } catch (const ValidationError&) {
    return std::nullopt;  // an intermediate form left the positive orbit
  }
}

FlowSample sample(const LieBracket& mu, const KForm& phi, double t, double dt) {
  const OrthonormalFrame f = orthonormal_frame({mu, phi});
  FlowSample s;
  s.t = t;
  s.phi = phi;
  s.dt = dt;
  s.F = pinching_F(f.in_frame.mu).F;
  s.tau_norm2 = torsion_two_form(f.in_frame, true).tau.norm2();
  s.closedness_drift = closedness_defect({mu, phi});
  return s;
}

}  // namespace

FlowResult laplacian_flow(const G2Structure& start, double t_end, double dt_initial,
                          const FlowOptions& options) {
  if (!(t_end >= 0.0) || !(dt_initial > 0.0))
    throw ValidationError("flow needs t_end >= 0 and dt > 0");
  if (closedness_defect(start) > options.closedness_tol)
    throw ValidationError("flow needs a closed starting structure");

  FlowResult r;
  const LieBracket& mu = start.mu;
  KForm phi = start.phi;
  double t = 0.0;
  double dt = dt_initial;
  int successes = 0;
  r.samples.push_back(sample(mu, phi, t, 0.0));

  while (t < t_end * (1.0 - 1e-12)) {
    const double h = std::min(dt, t_end - t);
    int halvings = 0;
    bool drift_failure = false;
    std::optional<KForm> next;
    double used = h;
    for (; halvings <= options.max_halvings; ++halvings, used *= 0.5) {
      next = rk4_step(mu, phi, used);
      drift_failure = false;
      if (!next) continue;
      try {
        if (closedness_defect({mu, *next}) <= options.closedness_tol) break;
      } catch (const ValidationError&) {
        next.reset();
        continue;
      }
      drift_failure = true;
      next.reset();
    }
    if (!next) {
      if (drift_failure)
        r.aborted = true;
      else
        r.truncated = true;
      break;
    }
    r.rejected_steps += halvings;
    phi = *next;
    t += used;
    r.samples.push_back(sample(mu, phi, t, used));

    if (halvings > 0) {
      dt = used;
      successes = 0;
    } else if (++successes >= 4 && dt < dt_initial) {
      dt = std::min(2.0 * dt, dt_initial);
      successes = 0;
    }
  }
  return r;
}

}  // namespace g2pinch
