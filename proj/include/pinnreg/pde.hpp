#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinnreg/net.hpp"

namespace pinnreg {

enum class ProblemKind { burgers1d, wave2d, ns2d_block };
enum class BoundaryKind { dirichlet, periodic, mixed_ns };
enum class Region { interior, initial, boundary };
enum class NsStart { uniform, rest };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

struct Domain {
  std::vector<std::array<double, 2>> spatial;  // per axis [lo, hi]
  std::array<double, 2> time{0.0, 1.0};

  int spatial_dim() const { return static_cast<int>(spatial.size()); }
  void validate() const;
};

struct Rect {
  double x0, x1, y0, y1;
  /// Closed rectangle.
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool on_boundary(double x, double y) const;
};

struct PdeConstants {
  double nu = 0.0;
  double rho = 1.0;
  double c = 1.0;
  double re = 0.0;
};

/// A PDE on Omega x [0, T] with its initial and boundary data.
struct PdeProblem {
  ProblemKind kind = ProblemKind::burgers1d;
  Domain domain;
  PdeConstants constants;
  BoundaryKind boundary_kind = BoundaryKind::periodic;

  // burgers1d: replace -nu u_xx by -u_xxx (needs third-order jets, which
  // the engine does not provide).
  bool burgers_third_order = false;
  // wave2d: Gaussian pulse exp(-width ((x-cx)^2 + (y-cy)^2)).
  std::array<double, 2> wave_center{0.4, 0.0};
  double wave_width = 40.0;
  // ns2d_block
  std::optional<Rect> block;
  double inflow = 1.0;
  NsStart ns_start = NsStart::uniform;

  int spatial_dim() const { return domain.spatial_dim(); }
  int input_dim() const { return spatial_dim() + 1; }
  int time_axis() const { return spatial_dim(); }
  int output_dim() const { return kind == ProblemKind::ns2d_block ? 3 : 1; }
  int equation_count() const { return kind == ProblemKind::ns2d_block ? 3 : 1; }
  std::vector<std::string> field_names() const;

  /// Partials the domain residual reads.
  std::vector<Partial> domain_partials() const;
  JetSpec domain_spec() const;

  /// f(X) for each output (NS: u, v; pressure has no initial target).
  double initial_value(std::span<const double> x, int output) const;
  bool in_solid(double x, double y) const { return block && block->contains(x, y); }
  /// Strictly inside the spatial domain and outside any solid.
  bool is_interior(std::span<const double> x) const;
};

PdeProblem make_burgers(double nu = 0.01 / 3.14159265358979323846);
PdeProblem make_wave();
PdeProblem make_ns(bool with_block = true);

double burgers_initial(double x);

// ---------------------------------------------------------------------------
// Pointwise residual kernels, generic over the scalar type so the loss can
// linearize them with forward duals.

template <class T>
T burgers_kernel(const T& u, const T& u_t, const T& u_x, const T& u_xx, double nu) {
  return u_t + u * u_x - nu * u_xx;
}

template <class T>
T wave_kernel(const T& u_tt, const T& u_xx, const T& u_yy, double c) {
  return u_tt - c * c * (u_xx + u_yy);
}

template <class T>
struct NsPoint {
  T u, v, p;
  T u_x, u_y, u_t, v_x, v_y, v_t, p_x, p_y;
  T u_xx, u_yy, v_xx, v_yy, p_xx, p_yy;
};

template <class T>
std::array<T, 3> ns_kernel(const NsPoint<T>& q, double nu, double rho) {
  const T mom_u =
      q.u_t + q.u * q.u_x + q.v * q.u_y + (1.0 / rho) * q.p_x - nu * (q.u_xx + q.u_yy);
  const T mom_v =
      q.v_t + q.u * q.v_x + q.v * q.v_y + (1.0 / rho) * q.p_y - nu * (q.v_xx + q.v_yy);
  const T pressure =
      q.p_xx + q.p_yy + rho * (q.u_x * q.u_x + 2.0 * q.u_x * q.v_y + q.v_y * q.v_y);
  return {mom_u, mom_v, pressure};
}

/// Residual batches: one row per point, one column per governing equation.
/// Throw MissingPartial when the jet lacks a needed partial.
Eigen::MatrixXd burgers_residual(const JetBatch& jet, double nu);
Eigen::MatrixXd wave_residual(const JetBatch& jet, double c = 1.0);
Eigen::MatrixXd ns_residuals(const JetBatch& jet, double nu, double rho);
Eigen::MatrixXd residual(const PdeProblem& problem, const JetBatch& jet);

// ---------------------------------------------------------------------------
// Initial and boundary conditions as linear constraints on jet entries:
//   mismatch = d_axis u_output(row) - (partner ? d_axis u_output(partner) : target)
// where axis = -1 means the value itself. Constraints are grouped by
// (output, axis); a loss term is the sum over groups of the mean square.

struct Constraint {
  static constexpr std::uint32_t kNoPartner = UINT32_MAX;
  std::uint32_t row;
  std::uint32_t partner = kNoPartner;
  int output = 0;
  int axis = -1;
  double target = 0.0;
};

struct ConditionSet {
  Coords points;
  JetSpec spec;
  std::vector<Constraint> constraints;

  static int group_of(const Constraint& c, int input_dim) {
    return c.output * (1 + input_dim) + (c.axis + 1);
  }
};

/// f / g targets at initial (t = 0) or boundary points. Burgers boundary
/// points come in rows (x = lo, t), (x = hi, t) and become paired
/// periodicity constraints on u and u_x. Throws DomainError for points
/// outside the tagged region.
ConditionSet evaluate_ic_bc(const PdeProblem& problem, const Coords& points, Region region);

}  // namespace pinnreg
