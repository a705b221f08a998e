#include "pinnreg/pde.hpp"

#include <cmath>
#include <numbers>

#include "pinnreg/error.hpp"

namespace pinnreg {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::burgers1d: return "burgers1d";
    case ProblemKind::wave2d: return "wave2d";
    case ProblemKind::ns2d_block: return "ns2d_block";
  }
  return "?";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "burgers" || name == "burgers1d") return ProblemKind::burgers1d;
  if (name == "wave" || name == "wave2d") return ProblemKind::wave2d;
  if (name == "ns" || name == "ns2d_block" || name == "navier_stokes") return ProblemKind::ns2d_block;
  throw ConfigError("unknown problem '" + name + "' (expected burgers, wave or ns)");
}

void Domain::validate() const {
  if (spatial.empty()) throw DimensionError("domain needs at least one spatial axis");
  for (const auto& [lo, hi] : spatial)
    if (!(lo < hi)) throw DimensionError("domain axis with lo >= hi");
  if (time[0] != 0.0 || !(time[1] > 0.0)) throw DimensionError("time interval must be [0, T], T > 0");
}

bool Rect::on_boundary(double x, double y) const {
  if (!contains(x, y)) return false;
  return near(x, x0) || near(x, x1) || near(y, y0) || near(y, y1);
}

std::vector<std::string> PdeProblem::field_names() const {
  if (kind == ProblemKind::ns2d_block) return {"u", "v", "p"};
  return {"u"};
}

std::vector<Partial> PdeProblem::domain_partials() const {
  switch (kind) {
    case ProblemKind::burgers1d:
      if (burgers_third_order) return {{{}}, {{1}}, {{0}}, {{0, 0, 0}}};
      return {{{}}, {{1}}, {{0}}, {{0, 0}}};
    case ProblemKind::wave2d:
      return {{{0, 0}}, {{1, 1}}, {{2, 2}}};
    case ProblemKind::ns2d_block:
      return {{{}}, {{0}}, {{1}}, {{2}}, {{0, 0}}, {{1, 1}}};
  }
  return {};
}

JetSpec PdeProblem::domain_spec() const {
  return JetSpec::from_partials(domain_partials(), input_dim());
}

double burgers_initial(double x) {
  return -std::sin(std::numbers::pi * x) + 1.0 / std::cosh(x);
}

double PdeProblem::initial_value(std::span<const double> x, int output) const {
  switch (kind) {
    case ProblemKind::burgers1d:
      return burgers_initial(x[0]);
    case ProblemKind::wave2d: {
      const double dx = x[0] - wave_center[0], dy = x[1] - wave_center[1];
      return std::exp(-wave_width * (dx * dx + dy * dy));
    }
    case ProblemKind::ns2d_block:
      if (output != 0 || ns_start == NsStart::rest || in_solid(x[0], x[1])) return 0.0;
      return inflow;
  }
  return 0.0;
}

bool PdeProblem::is_interior(std::span<const double> x) const {
  for (int a = 0; a < spatial_dim(); ++a)
    if (!(x[a] > domain.spatial[a][0] && x[a] < domain.spatial[a][1])) return false;
  return !(block && in_solid(x[0], x[1]));
}

PdeProblem make_burgers(double nu) {
  PdeProblem p;
  p.kind = ProblemKind::burgers1d;
  p.domain.spatial = {{-1.0, 1.0}};
  p.domain.time = {0.0, 1.0};
  p.constants.nu = nu;
  p.boundary_kind = BoundaryKind::periodic;
  return p;
}

PdeProblem make_wave() {
  PdeProblem p;
  p.kind = ProblemKind::wave2d;
  p.domain.spatial = {{-1.0, 1.0}, {-1.0, 1.0}};
  p.domain.time = {0.0, 1.0};
  p.constants.c = 1.0;
  p.boundary_kind = BoundaryKind::dirichlet;
  return p;
}

PdeProblem make_ns(bool with_block) {
  PdeProblem p;
  p.kind = ProblemKind::ns2d_block;
  p.domain.spatial = {{0.0, 20.0}, {0.0, 10.0}};
  p.domain.time = {0.0, 1.0};
  p.constants.nu = 0.04;
  p.constants.rho = 1.0;
  p.constants.re = 50.0;
  p.boundary_kind = BoundaryKind::mixed_ns;
  if (with_block) p.block = Rect{7.0, 9.0, 4.0, 6.0};
  return p;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd burgers_residual(const JetBatch& jet, double nu) {
  const auto& u_x = jet.d(0);
  const auto& u_t = jet.d(1);
  const auto& u_xx = jet.dd(0, 0);
  Eigen::MatrixXd r(jet.size(), 1);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    r(i, 0) = burgers_kernel(jet.value(i, 0), u_t(i, 0), u_x(i, 0), u_xx(i, 0), nu);
  return r;
}

Eigen::MatrixXd wave_residual(const JetBatch& jet, double c) {
  const auto& u_xx = jet.dd(0, 0);
  const auto& u_yy = jet.dd(1, 1);
  const auto& u_tt = jet.dd(2, 2);
  Eigen::MatrixXd r(jet.size(), 1);
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    r(i, 0) = wave_kernel(u_tt(i, 0), u_xx(i, 0), u_yy(i, 0), c);
  return r;
}

Eigen::MatrixXd ns_residuals(const JetBatch& jet, double nu, double rho) {
  if (jet.value.cols() != 3) throw DimensionError("Navier-Stokes jets need outputs (u, v, p)");
  const auto& dx = jet.d(0);
  const auto& dy = jet.d(1);
  const auto& dt = jet.d(2);
  const auto& dxx = jet.dd(0, 0);
  const auto& dyy = jet.dd(1, 1);
  Eigen::MatrixXd r(jet.size(), 3);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const NsPoint<double> q{jet.value(i, 0), jet.value(i, 1), jet.value(i, 2),
                            dx(i, 0),        dy(i, 0),        dt(i, 0),
                            dx(i, 1),        dy(i, 1),        dt(i, 1),
                            dx(i, 2),        dy(i, 2),        dxx(i, 0),
                            dyy(i, 0),       dxx(i, 1),       dyy(i, 1),
                            dxx(i, 2),       dyy(i, 2)};
    const auto res = ns_kernel(q, nu, rho);
    for (int e = 0; e < 3; ++e) r(i, e) = res[e];
  }
  return r;
}

Eigen::MatrixXd residual(const PdeProblem& problem, const JetBatch& jet) {
  switch (problem.kind) {
    case ProblemKind::burgers1d:
      if (problem.burgers_third_order)
        throw UnsupportedOrder("third-order Burgers form needs u_xxx; jets stop at order 2");
      return burgers_residual(jet, problem.constants.nu);
    case ProblemKind::wave2d:
      return wave_residual(jet, problem.constants.c);
    case ProblemKind::ns2d_block:
      return ns_residuals(jet, problem.constants.nu, problem.constants.rho);
  }
  return {};
}

// ---------------------------------------------------------------------------

namespace {

std::string describe(const Coords& points, Eigen::Index row) {
  std::string s = "(";
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    if (c) s += ", ";
    s += std::to_string(points(row, c));
  }
  return s + ")";
}

void initial_conditions(const PdeProblem& problem, ConditionSet& set) {
  const int D = problem.spatial_dim();
  const int t_axis = problem.time_axis();
  std::vector<double> x(D);
  for (Eigen::Index i = 0; i < set.points.rows(); ++i) {
    if (set.points(i, t_axis) != 0.0)
      throw DomainError("initial-condition point not at t = 0: " + describe(set.points, i));
    for (int a = 0; a < D; ++a) {
      x[a] = set.points(i, a);
      if (x[a] < problem.domain.spatial[a][0] || x[a] > problem.domain.spatial[a][1])
        throw DomainError("initial-condition point outside the domain: " + describe(set.points, i));
    }
    const auto row = static_cast<std::uint32_t>(i);
    switch (problem.kind) {
      case ProblemKind::burgers1d:
        set.constraints.push_back({row, Constraint::kNoPartner, 0, -1, problem.initial_value(x, 0)});
        break;
      case ProblemKind::wave2d:
        set.constraints.push_back({row, Constraint::kNoPartner, 0, -1, problem.initial_value(x, 0)});
        set.constraints.push_back({row, Constraint::kNoPartner, 0, t_axis, 0.0});
        break;
      case ProblemKind::ns2d_block:
        if (problem.block && problem.block->contains(x[0], x[1]) &&
            !problem.block->on_boundary(x[0], x[1]))
          throw DomainError("initial-condition point inside the block: " + describe(set.points, i));
        set.constraints.push_back({row, Constraint::kNoPartner, 0, -1, problem.initial_value(x, 0)});
        set.constraints.push_back({row, Constraint::kNoPartner, 1, -1, 0.0});
        break;
    }
  }
  if (problem.kind == ProblemKind::wave2d) set.spec.first = true;
}

void burgers_boundary(const PdeProblem& problem, ConditionSet& set) {
  const double lo = problem.domain.spatial[0][0], hi = problem.domain.spatial[0][1];
  const auto& pts = set.points;
  if (pts.rows() % 2 != 0)
    throw DomainError("periodic boundary points must come in (lo, t), (hi, t) pairs");
  for (Eigen::Index i = 0; i < pts.rows(); i += 2) {
    if (pts(i, 0) != lo || pts(i + 1, 0) != hi || pts(i, 1) != pts(i + 1, 1))
      throw DomainError("periodic boundary rows " + describe(pts, i) + ", " +
                        describe(pts, i + 1) + " are not a matched pair");
    const auto row = static_cast<std::uint32_t>(i);
    set.constraints.push_back({row, row + 1, 0, -1, 0.0});
    set.constraints.push_back({row, row + 1, 0, 0, 0.0});
  }
  set.spec.first = true;
}

void wave_boundary(const PdeProblem& problem, ConditionSet& set) {
  const auto& ax = problem.domain.spatial;
  for (Eigen::Index i = 0; i < set.points.rows(); ++i) {
    const double x = set.points(i, 0), y = set.points(i, 1);
    const bool inside = x >= ax[0][0] && x <= ax[0][1] && y >= ax[1][0] && y <= ax[1][1];
    const bool edge = x == ax[0][0] || x == ax[0][1] || y == ax[1][0] || y == ax[1][1];
    if (!inside || !edge) throw DomainError("boundary point not on the boundary: " + describe(set.points, i));
    set.constraints.push_back({static_cast<std::uint32_t>(i), Constraint::kNoPartner, 0, -1, 0.0});
  }
}

void ns_boundary(const PdeProblem& problem, ConditionSet& set) {
  const auto& ax = problem.domain.spatial;
  enum { U = 0, V = 1, P = 2, X = 0, Y = 1 };
  for (Eigen::Index i = 0; i < set.points.rows(); ++i) {
    const double x = set.points(i, 0), y = set.points(i, 1);
    const auto row = static_cast<std::uint32_t>(i);
    auto add = [&](int output, int axis, double target) {
      set.constraints.push_back({row, Constraint::kNoPartner, output, axis, target});
    };
    const bool inside = x >= ax[0][0] && x <= ax[0][1] && y >= ax[1][0] && y <= ax[1][1];
    if (inside && x == ax[0][0]) {
      add(U, -1, problem.inflow);
      add(V, -1, 0.0);
    } else if (inside && x == ax[0][1]) {
      add(U, X, 0.0);
      add(V, X, 0.0);
      add(P, -1, 0.0);
    } else if (inside && (y == ax[1][0] || y == ax[1][1])) {
      add(V, -1, 0.0);
      add(U, Y, 0.0);
    } else if (problem.block && problem.block->on_boundary(x, y)) {
      add(U, -1, 0.0);
      add(V, -1, 0.0);
    } else {
      throw DomainError("boundary point not on any boundary segment: " + describe(set.points, i));
    }
  }
  set.spec.first = true;
}

}  // namespace

ConditionSet evaluate_ic_bc(const PdeProblem& problem, const Coords& points, Region region) {
  if (points.cols() != problem.input_dim())
    throw DimensionError("condition points have the wrong number of coordinates");
  ConditionSet set;
  set.points = points;
  const int t_axis = problem.time_axis();
  if (region == Region::initial) {
    initial_conditions(problem, set);
    return set;
  }
  if (region != Region::boundary) throw std::invalid_argument("evaluate_ic_bc: region must be initial or boundary");
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    if (points(i, t_axis) < problem.domain.time[0] || points(i, t_axis) > problem.domain.time[1])
      throw DomainError("boundary point outside [0, T]: " + describe(points, i));
  switch (problem.kind) {
    case ProblemKind::burgers1d: burgers_boundary(problem, set); break;
    case ProblemKind::wave2d: wave_boundary(problem, set); break;
    case ProblemKind::ns2d_block: ns_boundary(problem, set); break;
  }
  return set;
}

}  // namespace pinnreg
