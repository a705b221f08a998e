#pragma once

// Straightforward re-implementations used as oracles: a loop-based network
// forward pass and a second-order forward jet, both generic over the scalar
// type so they also run on the reverse-mode tape.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "pinnreg/loss.hpp"
#include "pinnreg/net.hpp"
#include "pinnreg/pde.hpp"
#include "pinnreg/sampling.hpp"

namespace naive {

using pinnreg::NetworkArch;

/// Value and all first/second input partials (up to 3 inputs).
template <class T>
struct Jet {
  T v{};
  std::array<T, 3> d{};
  std::array<std::array<T, 3>, 3> dd{};
};

template <class T>
Jet<T> constant_jet(const T& c) {
  Jet<T> j;
  j.v = c;
  return j;
}

/// One dense layer applied to a vector of jets; `theta` is read from `at`
/// onwards (row-major weights, then bias) and `at` is advanced.
template <class T>
std::vector<Jet<T>> dense(std::span<const T> theta, std::size_t& at, const std::vector<Jet<T>>& in, int rows,
                          int dims) {
  const int cols = static_cast<int>(in.size());
  std::vector<Jet<T>> out(rows);
  for (int r = 0; r < rows; ++r) {
    Jet<T> z;
    for (int c = 0; c < cols; ++c) {
      const T& w = theta[at + static_cast<std::size_t>(r) * cols + c];
      z.v = z.v + w * in[c].v;
      for (int a = 0; a < dims; ++a) {
        z.d[a] = z.d[a] + w * in[c].d[a];
        for (int b = 0; b < dims; ++b) z.dd[a][b] = z.dd[a][b] + w * in[c].dd[a][b];
      }
    }
    z.v = z.v + theta[at + static_cast<std::size_t>(rows) * cols + r];
    out[r] = z;
  }
  at += static_cast<std::size_t>(rows) * cols + rows;
  return out;
}

template <class T>
Jet<T> tanh_jet(const Jet<T>& z, int dims) {
  using std::tanh;
  const T s = tanh(z.v);
  const T s1 = T(1.0) - s * s;
  const T s2 = T(-2.0) * s * s1;
  Jet<T> a;
  a.v = s;
  for (int i = 0; i < dims; ++i) {
    a.d[i] = s1 * z.d[i];
    for (int j = 0; j < dims; ++j) a.dd[i][j] = s2 * z.d[i] * z.d[j] + s1 * z.dd[i][j];
  }
  return a;
}

/// Network jets at one point.
template <class T>
std::vector<Jet<T>> network_jet(const NetworkArch& arch, std::span<const T> theta, std::span<const double> x) {
  const int D = arch.input_dim;
  std::vector<Jet<T>> h(D);
  for (int a = 0; a < D; ++a) {
    h[a].v = T(x[a]);
    h[a].d[a] = T(1.0);
  }
  std::size_t at = 0;
  auto act = [&](std::vector<Jet<T>> v) {
    for (auto& j : v) j = tanh_jet(j, D);
    return v;
  };
  h = act(dense(theta, at, h, arch.width, D));
  for (int b = 0; b < arch.blocks; ++b) {
    std::vector<Jet<T>> f = h;
    for (int l = 0; l < arch.layers_per_block; ++l) f = act(dense(theta, at, f, arch.width, D));
    for (int k = 0; k < arch.width; ++k) {
      h[k].v = h[k].v + f[k].v;
      for (int a = 0; a < D; ++a) {
        h[k].d[a] = h[k].d[a] + f[k].d[a];
        for (int c = 0; c < D; ++c) h[k].dd[a][c] = h[k].dd[a][c] + f[k].dd[a][c];
      }
    }
  }
  return dense(theta, at, h, arch.output_dim, D);
}

template <class T>
std::vector<T> network_value(const NetworkArch& arch, std::span<const T> theta, std::span<const double> x) {
  const auto j = network_jet(arch, theta, x);
  std::vector<T> out;
  for (const auto& o : j) out.push_back(o.v);
  return out;
}

/// Sum of mean squares of one condition set.
template <class T>
T condition_loss(const NetworkArch& arch, std::span<const T> theta, const pinnreg::ConditionSet& set) {
  const int D = arch.input_dim;
  std::vector<std::vector<Jet<T>>> jets;
  for (Eigen::Index i = 0; i < set.points.rows(); ++i) {
    std::vector<double> x(D);
    for (int a = 0; a < D; ++a) x[a] = set.points(i, a);
    jets.push_back(network_jet(arch, theta, x));
  }
  const int groups = arch.output_dim * (1 + D);
  std::vector<T> sums(groups, T(0.0));
  std::vector<int> counts(groups, 0);
  for (const auto& c : set.constraints) {
    auto pick = [&](std::size_t row) {
      const Jet<T>& j = jets[row][c.output];
      return c.axis < 0 ? j.v : j.d[c.axis];
    };
    T m = pick(c.row);
    m = c.partner == pinnreg::Constraint::kNoPartner ? m - T(c.target) : m - pick(c.partner);
    const int g = pinnreg::ConditionSet::group_of(c, D);
    sums[g] = sums[g] + m * m;
    ++counts[g];
  }
  T total(0.0);
  for (int g = 0; g < groups; ++g)
    if (counts[g] > 0) total = total + sums[g] * T(1.0 / counts[g]);
  return total;
}

template <class T>
T domain_loss(const pinnreg::PdeProblem& p, const NetworkArch& arch, std::span<const T> theta,
              const pinnreg::Coords& pts) {
  const int D = arch.input_dim;
  T sum(0.0);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    std::vector<double> x(D);
    for (int a = 0; a < D; ++a) x[a] = pts(i, a);
    const auto j = network_jet(arch, theta, x);
    switch (p.kind) {
      case pinnreg::ProblemKind::burgers1d: {
        const T r = pinnreg::burgers_kernel(j[0].v, j[0].d[1], j[0].d[0], j[0].dd[0][0], p.constants.nu);
        sum = sum + r * r;
        break;
      }
      case pinnreg::ProblemKind::wave2d: {
        const T r = pinnreg::wave_kernel(j[0].dd[2][2], j[0].dd[0][0], j[0].dd[1][1], p.constants.c);
        sum = sum + r * r;
        break;
      }
      case pinnreg::ProblemKind::ns2d_block: {
        const pinnreg::NsPoint<T> q{j[0].v,        j[1].v,        j[2].v,        j[0].d[0],     j[0].d[1],
                                    j[0].d[2],     j[1].d[0],     j[1].d[1],     j[1].d[2],     j[2].d[0],
                                    j[2].d[1],     j[0].dd[0][0], j[0].dd[1][1], j[1].dd[0][0], j[1].dd[1][1],
                                    j[2].dd[0][0], j[2].dd[1][1]};
        for (const T& r : pinnreg::ns_kernel(q, p.constants.nu, p.constants.rho)) sum = sum + r * r;
        break;
      }
    }
  }
  return sum * T(1.0 / static_cast<double>(pts.rows()));
}

/// The composite objective, assembled term by term.
template <class T>
T composite(const pinnreg::PdeProblem& p, const NetworkArch& arch, std::span<const T> theta,
            const pinnreg::TrainSet& set, const pinnreg::LossWeights& w) {
  using pinnreg::Region;
  T total = T(w.domain) * domain_loss(p, arch, theta, set.domain);
  total = total + T(w.initial) * condition_loss(arch, theta, pinnreg::evaluate_ic_bc(p, set.initial, Region::initial));
  total = total + T(w.boundary) * condition_loss(arch, theta, pinnreg::evaluate_ic_bc(p, set.boundary, Region::boundary));
  if (set.regulator && set.regulator->size() > 0) {
    pinnreg::ConditionSet data;
    data.points = set.regulator->points;
    for (Eigen::Index i = 0; i < data.points.rows(); ++i)
      for (int o = 0; o < arch.output_dim; ++o)
        data.constraints.push_back({static_cast<std::uint32_t>(i), pinnreg::Constraint::kNoPartner, o, -1,
                                    set.regulator->targets(i, o)});
    total = total + T(w.data * set.regulator->weight) * condition_loss(arch, theta, data);
  }
  return total;
}

}  // namespace naive
