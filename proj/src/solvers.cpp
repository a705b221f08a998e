#include "pinnreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "pinnreg/error.hpp"

namespace pinnreg {

namespace {

constexpr double kPi = std::numbers::pi;

int steps_for(double t_end, double dt, const SnapshotPlan& plan) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (plan.count < 2) throw ConfigError("need at least two snapshots");
  const long steps = std::lround(t_end / dt);
  if (steps < 1 || std::abs(steps * dt - t_end) > 1e-9 * t_end)
    throw ConfigError("time step does not divide the time interval");
  if (steps % (plan.count - 1) != 0)
    throw ConfigError("step count " + std::to_string(steps) + " is not a multiple of " +
                      std::to_string(plan.count - 1) + " snapshot intervals");
  return static_cast<int>(steps);
}

std::vector<double> snapshot_times(double t_end, const SnapshotPlan& plan) {
  std::vector<double> times(plan.count);
  for (int i = 0; i < plan.count; ++i) times[i] = t_end * i / (plan.count - 1);
  return times;
}

void require_finite(const std::vector<double>& v, const char* solver, double t) {
  for (double x : v)
    if (!std::isfinite(x))
      throw NumericalError(std::string(solver) + ": instability, non-finite values at t = " +
                           std::to_string(t));
}

// RAII wrappers for the two FFTW plans the Burgers solver needs.
class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        real_(fftw_alloc_real(n)),
        spec_(fftw_alloc_complex(n / 2 + 1)),
        forward_(fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE)),
        inverse_(fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE)) {}
  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  void to_spectral(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(forward_);
    for (int m = 0; m <= n_ / 2; ++m) out[m] = {spec_[m][0], spec_[m][1]};
  }
  void to_physical(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
    for (int m = 0; m <= n_ / 2; ++m) {
      spec_[m][0] = in[m].real();
      spec_[m][1] = in[m].imag();
    }
    fftw_execute(inverse_);
    for (int j = 0; j < n_; ++j) out[j] = real_[j] / n_;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

}  // namespace

// ---------------------------------------------------------------------------

SolutionField solve_burgers_spectral(const PdeProblem& problem, const BurgersSolverOptions& opts) {
  if (problem.kind != ProblemKind::burgers1d) throw ConfigError("spectral solver is for burgers1d");
  if (problem.burgers_third_order)
    throw ConfigError("spectral solver implements the viscous (second-order) Burgers form");
  const int n = opts.resolution;
  if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("Burgers resolution must be a power of two >= 8");
  const double lo = problem.domain.spatial[0][0], hi = problem.domain.spatial[0][1];
  const double length = hi - lo;
  const double t_end = problem.domain.time[1];
  const double nu = problem.constants.nu;
  const double dt = opts.dt;
  const int steps = steps_for(t_end, dt, opts.snapshots);
  const int every = steps / (opts.snapshots.count - 1);

  SolutionField field;
  field.grid.resize(1);
  for (int j = 0; j <= n; ++j) field.grid[0].push_back(j == n ? hi : lo + length * j / n);
  field.times = snapshot_times(t_end, opts.snapshots);
  field.names = {"u"};
  field.values.assign(1, std::vector<double>((n + 1) * field.times.size()));
  field.meta = {"burgers_fourier_ifrk4", {n}, dt};

  const int modes = n / 2 + 1;
  std::vector<double> k(modes), decay_half(modes), decay_full(modes);
  std::vector<bool> keep(modes);
  for (int m = 0; m < modes; ++m) {
    k[m] = 2.0 * kPi * m / length;
    keep[m] = 3 * m <= n && m < n / 2;
    decay_half[m] = std::exp(-nu * k[m] * k[m] * dt / 2.0);
    decay_full[m] = decay_half[m] * decay_half[m];
  }

  RealFft fft(n);
  std::vector<double> u(n), flux(n);
  for (int j = 0; j < n; ++j)
    u[j] = opts.initial ? opts.initial(field.grid[0][j])
                        : problem.initial_value(std::span<const double>(&field.grid[0][j], 1), 0);

  using Spectrum = std::vector<std::complex<double>>;
  Spectrum uh(modes), flux_h(modes);
  fft.to_spectral(u, uh);

  // Nonlinear term -d/dx (u^2 / 2), dealiased.
  auto nonlinear = [&](const Spectrum& vh, Spectrum& out) {
    fft.to_physical(vh, u);
    for (int j = 0; j < n; ++j) flux[j] = 0.5 * u[j] * u[j];
    fft.to_spectral(flux, flux_h);
    for (int m = 0; m < modes; ++m)
      out[m] = keep[m] ? std::complex<double>(0.0, -k[m]) * flux_h[m] : 0.0;
  };

  auto store = [&](int snap, const std::vector<double>& phys) {
    auto& v = field.values[0];
    for (int j = 0; j < n; ++j) v[snap * (n + 1) + j] = phys[j];
    v[snap * (n + 1) + n] = phys[0];
  };
  store(0, u);

  Spectrum a(modes), b(modes), c(modes), d(modes), tmp(modes);
  for (int step = 1; step <= steps; ++step) {
    nonlinear(uh, a);
    for (int m = 0; m < modes; ++m) tmp[m] = decay_half[m] * (uh[m] + 0.5 * dt * a[m]);
    nonlinear(tmp, b);
    for (int m = 0; m < modes; ++m) tmp[m] = decay_half[m] * uh[m] + 0.5 * dt * b[m];
    nonlinear(tmp, c);
    for (int m = 0; m < modes; ++m) tmp[m] = decay_full[m] * uh[m] + dt * decay_half[m] * c[m];
    nonlinear(tmp, d);
    for (int m = 0; m < modes; ++m)
      uh[m] = decay_full[m] * uh[m] +
              dt / 6.0 * (decay_full[m] * a[m] + 2.0 * decay_half[m] * (b[m] + c[m]) + d[m]);
    if (step % every == 0) {
      fft.to_physical(uh, u);
      require_finite(u, "burgers spectral solver", step * dt);
      store(step / every, u);
    }
  }
  return field;
}

// ---------------------------------------------------------------------------

std::vector<double> chebyshev_nodes(int points) {
  const int n = points - 1;
  std::vector<double> x(points);
  for (int j = 0; j <= n; ++j) x[j] = -std::cos(kPi * j / n);
  // Pin exact symmetry; cos() leaves rounding residue around zero.
  for (int j = 0; j <= n / 2; ++j) x[n - j] = -x[j];
  if (n % 2 == 0) x[n / 2] = 0.0;
  return x;
}

Eigen::MatrixXd chebyshev_diff_matrix(int points) {
  const int n = points - 1;
  const auto x = chebyshev_nodes(points);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(points, points);
  auto weight = [n](int j) { return (j == 0 || j == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = weight(i) / weight(j) * sign / (x[i] - x[j]);
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

Eigen::VectorXd clenshaw_curtis_weights(int points) {
  const int n = points - 1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(points);
  // Nodes cos(theta_j); the weights are symmetric so ordering does not matter.
  for (int j = 0; j <= n; ++j) {
    const double theta = kPi * j / n;
    double s = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
      const double b = (2 * k == n) ? 1.0 : 2.0;
      s += b / (4.0 * k * k - 1.0) * std::cos(2.0 * k * theta);
    }
    const double c = (j == 0 || j == n) ? 1.0 : 2.0;
    w[j] = c / n * (1.0 - s);
  }
  return w;
}

double chebyshev_interpolate(const std::vector<double>& nodes, std::span<const double> values, double x) {
  const std::size_t n = nodes.size() - 1;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double diff = x - nodes[j];
    if (diff == 0.0) return values[j];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n) w *= 0.5;
    num += w / diff * values[j];
    den += w / diff;
  }
  return num / den;
}

namespace {

// Largest |eigenvalue| of the interior second-derivative operator, by
// power iteration from a fixed start vector.
double second_derivative_radius(const Eigen::MatrixXd& d2) {
  const Eigen::Index m = d2.rows() - 2;
  const Eigen::MatrixXd inner = d2.block(1, 1, m, m);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(m, 1.0, 2.0);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Eigen::VectorXd w = inner * v;
    const double next = w.norm() / v.norm();
    v = w / w.norm();
    if (std::abs(next - lambda) <= 1e-10 * next) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

SolutionField solve_wave_chebyshev(const PdeProblem& problem, const WaveSolverOptions& opts,
                                   WaveDiagnostics* diagnostics) {
  if (problem.kind != ProblemKind::wave2d) throw ConfigError("Chebyshev solver is for wave2d");
  const int points = opts.resolution;
  if (points < 16) throw ConfigError("wave resolution must be at least 16 points per axis");
  const double t_end = problem.domain.time[1];
  const double dt = opts.dt;
  const double c2 = problem.constants.c * problem.constants.c;
  const int steps = steps_for(t_end, dt, opts.snapshots);
  const int every = steps / (opts.snapshots.count - 1);

  // Nodes live on [-1, 1]; map affinely to the problem's square.
  const auto ref = chebyshev_nodes(points);
  const auto& ax = problem.domain.spatial;
  const double sx = (ax[0][1] - ax[0][0]) / 2.0, sy = (ax[1][1] - ax[1][0]) / 2.0;
  std::vector<double> xs(points), ys(points);
  for (int j = 0; j < points; ++j) {
    xs[j] = ax[0][0] + sx * (ref[j] + 1.0);
    ys[j] = ax[1][0] + sy * (ref[j] + 1.0);
  }
  const Eigen::MatrixXd d1 = chebyshev_diff_matrix(points);
  const Eigen::MatrixXd dx = d1 / sx, dy = d1 / sy;
  const Eigen::MatrixXd dxx = dx * dx, dyy = dy * dy;

  const double radius = c2 * (second_derivative_radius(dxx) + second_derivative_radius(dyy));
  if (dt * dt * radius > 4.0)
    throw NumericalError("wave solver: dt = " + std::to_string(dt) +
                         " exceeds the leapfrog stability limit " +
                         std::to_string(2.0 / std::sqrt(radius)));

  // U(ix, iy)
  Eigen::MatrixXd u0(points, points);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) {
      const double x = xs[i], y = ys[j];
      const double coords[2] = {x, y};
      u0(i, j) = opts.initial ? opts.initial(x, y) : problem.initial_value(coords, 0);
    }
  auto clamp_walls = [points](Eigen::MatrixXd& u) {
    u.row(0).setZero();
    u.row(points - 1).setZero();
    u.col(0).setZero();
    u.col(points - 1).setZero();
  };
  clamp_walls(u0);
  auto laplacian = [&](const Eigen::MatrixXd& u) -> Eigen::MatrixXd {
    return c2 * (dxx * u + u * dyy.transpose());
  };

  SolutionField field;
  field.grid = {xs, ys};
  field.times = snapshot_times(t_end, opts.snapshots);
  field.names = {"u"};
  const std::size_t nodes = static_cast<std::size_t>(points) * points;
  field.values.assign(1, std::vector<double>(nodes * field.times.size()));
  field.meta = {"wave_chebyshev_leapfrog", {points, points}, dt};
  auto store = [&](int snap, const Eigen::MatrixXd& u) {
    auto& v = field.values[0];
    for (int j = 0; j < points; ++j)
      for (int i = 0; i < points; ++i) v[snap * nodes + static_cast<std::size_t>(j) * points + i] = u(i, j);
  };

  const Eigen::VectorXd wx = clenshaw_curtis_weights(points) * sx;
  const Eigen::VectorXd wy = clenshaw_curtis_weights(points) * sy;
  auto energy = [&](const Eigen::MatrixXd& ut, const Eigen::MatrixXd& u) -> double {
    const Eigen::MatrixXd ux = dx * u, uy = u * dy.transpose();
    const Eigen::ArrayXXd density = ut.array().square() + ux.array().square() + uy.array().square();
    return wx.dot(density.matrix() * wy);
  };

  Eigen::MatrixXd prev = u0;
  Eigen::MatrixXd curr = u0 + 0.5 * dt * dt * laplacian(u0);
  clamp_walls(curr);
  store(0, u0);
  if (diagnostics) {
    diagnostics->times = {0.0};
    diagnostics->energy = {energy(Eigen::MatrixXd::Zero(points, points), u0)};
  }
  if (every == 1) store(1, curr);

  for (int step = 1; step < steps; ++step) {
    Eigen::MatrixXd next = 2.0 * curr - prev + dt * dt * laplacian(curr);
    clamp_walls(next);
    if (diagnostics) {
      diagnostics->times.push_back(step * dt);
      diagnostics->energy.push_back(energy((next - prev) / (2.0 * dt), curr));
    }
    prev = std::move(curr);
    curr = std::move(next);
    const int n = step + 1;
    if (n % every == 0) {
      if (!curr.allFinite())
        throw NumericalError("wave solver: instability, non-finite values at t = " +
                             std::to_string(n * dt));
      store(n / every, curr);
    }
  }
  return field;
}

// ---------------------------------------------------------------------------

SolutionField solve_ns_ftcs(const PdeProblem& problem, const NsSolverOptions& opts) {
  if (problem.kind != ProblemKind::ns2d_block) throw ConfigError("FTCS solver is for ns2d_block");
  const int nx = opts.nx, ny = opts.ny;
  if (nx < 4 || ny < 4) throw ConfigError("NS grid needs at least 4 points per axis");
  const auto& ax = problem.domain.spatial;
  const double x0 = ax[0][0], y0 = ax[1][0];
  const double hx = (ax[0][1] - x0) / (nx - 1), hy = (ax[1][1] - y0) / (ny - 1);
  const double t_end = problem.domain.time[1];
  const double dt = opts.dt;
  const double nu = problem.constants.nu, rho = problem.constants.rho;
  const int steps = steps_for(t_end, dt, opts.snapshots);
  const int every = steps / (opts.snapshots.count - 1);

  SolutionField field;
  field.grid.assign(2, {});
  for (int i = 0; i < nx; ++i) field.grid[0].push_back(i == nx - 1 ? ax[0][1] : x0 + hx * i);
  for (int j = 0; j < ny; ++j) field.grid[1].push_back(j == ny - 1 ? ax[1][1] : y0 + hy * j);
  const auto& xs = field.grid[0];
  const auto& ys = field.grid[1];
  field.times = snapshot_times(t_end, opts.snapshots);
  field.names = {"u", "v", "p"};
  const std::size_t nodes = static_cast<std::size_t>(nx) * ny;
  field.values.assign(3, std::vector<double>(nodes * field.times.size()));
  field.meta = {"ns_ftcs", {nx, ny}, dt};

  auto id = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
  std::vector<std::uint8_t> solid(nodes, 0);
  bool any_solid = false;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (problem.in_solid(xs[i], ys[j])) {
        solid[id(i, j)] = 1;
        any_solid = true;
      }
  if (any_solid) field.solid = solid;

  std::vector<double> u(nodes), v(nodes, 0.0), p(nodes, 0.0), b(nodes, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double coords[2] = {xs[i], ys[j]};
      u[id(i, j)] = problem.initial_value(coords, 0);
      v[id(i, j)] = problem.initial_value(coords, 1);
    }

  auto velocity_bcs = [&](std::vector<double>& uu, std::vector<double>& vv) {
    for (int j = 0; j < ny; ++j) {
      uu[id(0, j)] = problem.inflow;
      vv[id(0, j)] = 0.0;
      uu[id(nx - 1, j)] = uu[id(nx - 2, j)];
      vv[id(nx - 1, j)] = vv[id(nx - 2, j)];
    }
    for (int i = 1; i < nx - 1; ++i) {
      vv[id(i, 0)] = 0.0;
      vv[id(i, ny - 1)] = 0.0;
      uu[id(i, 0)] = uu[id(i, 1)];
      uu[id(i, ny - 1)] = uu[id(i, ny - 2)];
    }
    for (std::size_t k = 0; k < nodes; ++k)
      if (solid[k]) uu[k] = vv[k] = 0.0;
  };
  // Neumann walls everywhere except the outlet (p = 0); solid nodes next to
  // fluid take the mean of their fluid neighbours.
  auto pressure_bcs = [&]() {
    for (int j = 0; j < ny; ++j) {
      p[id(0, j)] = p[id(1, j)];
      p[id(nx - 1, j)] = 0.0;
    }
    for (int i = 1; i < nx - 1; ++i) {
      p[id(i, 0)] = p[id(i, 1)];
      p[id(i, ny - 1)] = p[id(i, ny - 2)];
    }
    if (!any_solid) return;
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        if (!solid[id(i, j)]) continue;
        double sum = 0.0;
        int count = 0;
        for (const auto& [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          const std::size_t nb = id(i + di, j + dj);
          if (!solid[nb]) {
            sum += p[nb];
            ++count;
          }
        }
        if (count) p[id(i, j)] = sum / count;
      }
  };

  auto check_cfl = [&](double t) {
    double umax = 0.0, vmax = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
      umax = std::max(umax, std::abs(u[k]));
      vmax = std::max(vmax, std::abs(v[k]));
    }
    const double advective = dt * (umax / hx + vmax / hy);
    const double diffusive = nu * dt * (1.0 / (hx * hx) + 1.0 / (hy * hy));
    const double cell = dt * (umax * umax + vmax * vmax) / (2.0 * nu);
    if (!(advective <= 1.0 && diffusive <= 0.5 && cell <= 1.0))
      throw NumericalError("NS solver: CFL violation at t = " + std::to_string(t) +
                           " (advective " + std::to_string(advective) + ", diffusive " +
                           std::to_string(diffusive) + ", advection-diffusion " +
                           std::to_string(cell) + ")");
  };

  velocity_bcs(u, v);
  auto store = [&](int snap) {
    for (std::size_t k = 0; k < nodes; ++k) {
      field.values[0][snap * nodes + k] = u[k];
      field.values[1][snap * nodes + k] = v[k];
      field.values[2][snap * nodes + k] = p[k];
    }
  };
  store(0);

  const double hx2 = hx * hx, hy2 = hy * hy;
  const double denom = 2.0 * (hx2 + hy2);
  std::vector<double> un(nodes), vn(nodes);
  for (int step = 1; step <= steps; ++step) {
    check_cfl((step - 1) * dt);

    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t k = id(i, j);
        if (solid[k]) continue;
        const double ux = (u[k + 1] - u[k - 1]) / (2 * hx);
        const double vy = (v[k + nx] - v[k - nx]) / (2 * hy);
        const double quad = ux * ux + 2.0 * ux * vy + vy * vy;
        b[k] = rho * ((opts.divergence_source ? (ux + vy) / dt : 0.0) - quad);
      }

    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      double change = 0.0;
      for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
          const std::size_t k = id(i, j);
          if (solid[k]) continue;
          const double next =
              ((p[k + 1] + p[k - 1]) * hy2 + (p[k + nx] + p[k - nx]) * hx2 - b[k] * hx2 * hy2) / denom;
          change = std::max(change, std::abs(next - p[k]));
          p[k] = next;
        }
      pressure_bcs();
      if (!std::isfinite(change))
        throw NumericalError("NS solver: pressure Poisson iteration diverged at t = " +
                             std::to_string(step * dt));
      if (change < opts.poisson_tol) break;
    }

    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t k = id(i, j);
        if (solid[k]) continue;
        const double ux = (u[k + 1] - u[k - 1]) / (2 * hx), uy = (u[k + nx] - u[k - nx]) / (2 * hy);
        const double vx = (v[k + 1] - v[k - 1]) / (2 * hx), vy = (v[k + nx] - v[k - nx]) / (2 * hy);
        const double px = (p[k + 1] - p[k - 1]) / (2 * hx), py = (p[k + nx] - p[k - nx]) / (2 * hy);
        const double lap_u = (u[k + 1] - 2 * u[k] + u[k - 1]) / hx2 + (u[k + nx] - 2 * u[k] + u[k - nx]) / hy2;
        const double lap_v = (v[k + 1] - 2 * v[k] + v[k - 1]) / hx2 + (v[k + nx] - 2 * v[k] + v[k - nx]) / hy2;
        un[k] = u[k] - dt * (u[k] * ux + v[k] * uy + px / rho - nu * lap_u);
        vn[k] = v[k] - dt * (u[k] * vx + v[k] * vy + py / rho - nu * lap_v);
      }
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1 || solid[id(i, j)]) {
          un[id(i, j)] = u[id(i, j)];
          vn[id(i, j)] = v[id(i, j)];
        }
    velocity_bcs(un, vn);
    u.swap(un);
    v.swap(vn);

    if (step % every == 0) {
      require_finite(u, "NS solver", step * dt);
      require_finite(v, "NS solver", step * dt);
      require_finite(p, "NS solver", step * dt);
      store(step / every);
    }
  }
  return field;
}

}  // namespace pinnreg
