#pragma once

#include "g2pinch/g2core.hpp"
#include "g2pinch/liealg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace g2pinch {

using ParamMap = std::map<std::string, double>;

struct ParamRange {
  std::string name;
  double lo = -1e300;
  double hi = 1e300;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const;
  std::string describe() const;
};

struct FamilySpec {
  std::string name;
  std::string description;
  std::vector<ParamRange> params;
  /// Almost-abelian families carry a generating matrix A in sl_3(C) or gl_6(R).
  bool almost_abelian = true;
};

const std::vector<FamilySpec>& family_specs();
const FamilySpec& find_family(const std::string& name);

struct CatalogEntry {
  std::string family;
  ParamMap params;
  std::optional<AlmostAbelianSpec> spec;
  LieBracket mu;
};

/// Builds a catalog member. Unknown names, missing or extra parameters and
/// out-of-range values throw ValidationError.
CatalogEntry catalog(const std::string& name, const ParamMap& params = {});

/// F printed alongside the family, where one exists (closed-form reference).
std::optional<double> family_reference_F(const std::string& name, const ParamMap& params);

struct ScanRow {
  ParamMap params;
  std::optional<double> F;
  double scal = 0.0;
  double tau_norm2 = 0.0;
  bool closed = false;
  ClassFlags classes;
  std::optional<double> lap_soliton_residual;
  std::optional<double> lap_soliton_c;
  std::optional<double> erp_residual;
  std::optional<double> reference_F;
  std::string error;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  /// Empirical inf / sup of F over the successful rows.
  std::optional<double> F_inf;
  std::optional<double> F_sup;
  /// Grid value at which the supremum was found.
  std::optional<double> argmax;
};

struct Grid {
  std::string param;
  std::vector<double> values;
};

/// "t=a:b:step", inclusive of b when it lies on the lattice.
Grid parse_grid(const std::string& text);

/// Evaluates one catalog member; errors are captured in the row.
ScanRow evaluate_row(const std::string& family, const ParamMap& params, double tol = 1e-9);

/// One row per grid value, other parameters fixed by base. Rows are evaluated
/// on worker threads and returned in grid order.
ScanResult scan(const std::string& family, const Grid& grid, const ParamMap& base = {},
                unsigned threads = 0, double tol = 1e-9);

enum class Direction { max, min };

struct ExtremizeOptions {
  double fd_step = 1e-5;
  double grad_tol = 1e-8;
  int max_iterations = 10000;
};

struct ExtremizeResult {
  CMat3 a;
  double F = 0.0;
  std::vector<double> trace;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// F stalled while A kept moving: the extremum is approached at the orbit boundary.
  bool escapes_to_degeneration = false;
};

/// Orbit gradient of F at A: central differences along an orthonormal basis of
/// sl_3(C) acting by A -> exp(X) A exp(-X).
Eigen::Matrix<double, 16, 1> orbit_gradient(const CMat3& a, double step = 1e-5);

/// Gradient ascent (max) or descent (min) of F over the conjugation orbit of A,
/// with backtracking line search. A is renormalized to |A| = 1 after each step.
ExtremizeResult extremize_F(const AlmostAbelianSpec& start, Direction dir,
                            const ExtremizeOptions& options = {});

struct FlowSample {
  double t = 0.0;
  KForm phi{3};
  std::optional<double> F;
  double tau_norm2 = 0.0;
  double dt = 0.0;
  double closedness_drift = 0.0;
};

struct FlowOptions {
  double closedness_tol = 1e-8;
  int max_halvings = 30;
};

struct FlowResult {
  std::vector<FlowSample> samples;
  /// Positivity could not be kept even after max_halvings.
  bool truncated = false;
  /// Closedness drift beyond tolerance that step halving did not cure.
  bool aborted = false;
  int rejected_steps = 0;
};

/// d phi / dt = Delta_phi phi with the bracket fixed, integrated by classical
/// RK4; a step is halved when the new form is not positive or d phi drifts.
FlowResult laplacian_flow(const G2Structure& start, double t_end, double dt_initial,
                          const FlowOptions& options = {});

enum class Monotonicity { increasing, decreasing, constant, mixed };
std::string to_string(Monotonicity m);

/// Strict monotonicity of F across samples (constant when the spread is below tol).
Monotonicity flow_monotonicity(const FlowResult& r, double constant_tol = 1e-12);

}  // namespace g2pinch
