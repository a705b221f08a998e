#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pinnreg/field.hpp"
#include "pinnreg/pde.hpp"

namespace pinnreg {

/// Snapshot times i * T / (count - 1); the step count must be a multiple
/// of count - 1 so every snapshot lands on a step.
struct SnapshotPlan {
  int count = 101;
};

struct BurgersSolverOptions {
  int resolution = 512;  // power of two
  double dt = 1e-4;
  SnapshotPlan snapshots;
  /// Overrides the problem's initial condition when set.
  std::function<double(double)> initial;
};

/// Fourier pseudo-spectral Burgers solver on the periodic interval.
/// RK4 in integrating-factor form (the viscous term is integrated exactly),
/// 2/3-rule dealiasing of the nonlinear flux. The stored grid includes the
/// periodic endpoint so the field covers the closed interval.
SolutionField solve_burgers_spectral(const PdeProblem& problem, const BurgersSolverOptions& opts);

struct WaveSolverOptions {
  int resolution = 32;  // Chebyshev-Lobatto points per axis
  double dt = 1e-3;
  SnapshotPlan snapshots;
  /// Overrides the problem's Gaussian when set.
  std::function<double(double, double)> initial;
};

struct WaveDiagnostics {
  std::vector<double> times;
  std::vector<double> energy;  // integral of u_t^2 + |grad u|^2 per step
};

/// Chebyshev collocation in space, leapfrog in time, Dirichlet-0 walls,
/// zero initial rate (start-up step u1 = u0 + dt^2/2 L u0).
SolutionField solve_wave_chebyshev(const PdeProblem& problem, const WaveSolverOptions& opts,
                                   WaveDiagnostics* diagnostics = nullptr);

struct NsSolverOptions {
  int nx = 200;
  int ny = 100;
  double dt = 2e-3;
  SnapshotPlan snapshots;
  int max_sweeps = 500;
  double poisson_tol = 1e-5;
  /// Adds rho/dt * div(u) to the pressure source so each step pulls the
  /// velocity back towards zero divergence.
  bool divergence_source = true;
};

/// Explicit forward-time centred-space solver for flow past the block.
/// Pressure comes from Gauss-Seidel sweeps of the Poisson equation each step.
/// Throws NumericalError on a CFL violation or a diverging Poisson solve.
SolutionField solve_ns_ftcs(const PdeProblem& problem, const NsSolverOptions& opts);

// Spectral helpers, exposed for tests.

/// Chebyshev-Lobatto nodes -cos(pi j / n), j = 0..n, ascending.
std::vector<double> chebyshev_nodes(int points);
/// First-derivative collocation matrix on chebyshev_nodes(points).
Eigen::MatrixXd chebyshev_diff_matrix(int points);
/// Clenshaw-Curtis quadrature weights on chebyshev_nodes(points).
Eigen::VectorXd clenshaw_curtis_weights(int points);
/// Barycentric polynomial interpolation through Chebyshev-Lobatto data.
double chebyshev_interpolate(const std::vector<double>& nodes, std::span<const double> values, double x);

}  // namespace pinnreg
