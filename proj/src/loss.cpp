#include "pinnreg/loss.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "pinnreg/error.hpp"

namespace pinnreg {

namespace {

// Forward dual over the jet entries of one point.
constexpr int kMaxEntries = 18;

struct Dual {
  double v = 0.0;
  std::array<double, kMaxEntries> d{};
};

Dual operator+(const Dual& a, const Dual& b) {
  Dual r{a.v + b.v};
  for (int k = 0; k < kMaxEntries; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}
Dual operator-(const Dual& a, const Dual& b) {
  Dual r{a.v - b.v};
  for (int k = 0; k < kMaxEntries; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}
Dual operator*(const Dual& a, const Dual& b) {
  Dual r{a.v * b.v};
  for (int k = 0; k < kMaxEntries; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  return r;
}
Dual operator*(double s, const Dual& a) {
  Dual r{s * a.v};
  for (int k = 0; k < kMaxEntries; ++k) r.d[k] = s * a.d[k];
  return r;
}

struct ChunkResult {
  double sum = 0.0;
  std::vector<double> grad;
};

/// Runs fn(chunk_index, result) over all chunks, possibly on several
/// threads; results are reduced in chunk order by the caller.
template <class Fn>
std::vector<ChunkResult> for_chunks(Eigen::Index rows, Fn&& fn) {
  const Eigen::Index chunks = (rows + kLossChunk - 1) / kLossChunk;
  std::vector<ChunkResult> results(static_cast<std::size_t>(chunks));
  const int threads = std::min<int>(loss_threads(), static_cast<int>(chunks));
  if (threads <= 1) {
    for (Eigen::Index c = 0; c < chunks; ++c) fn(c, results[c]);
    return results;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (Eigen::Index c = t; c < chunks; c += threads) fn(c, results[c]);
    });
  pool.clear();
  return results;
}

void reduce_into(const std::vector<ChunkResult>& parts, double& value, std::vector<double>& grad,
                 bool with_grad) {
  for (const auto& p : parts) {
    value += p.sum;
    if (with_grad)
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += p.grad[i];
  }
}

std::atomic<int> thread_override{0};

}  // namespace

void set_loss_threads(int threads) { thread_override = std::max(0, threads); }

int loss_threads() {
  if (const int forced = thread_override.load(); forced > 0) return forced;
  static const int threads = [] {
    const char* env = std::getenv("PINNREG_THREADS");
    if (env == nullptr) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
  }();
  return threads;
}

LossEvaluator::LossEvaluator(PdeProblem problem, const TrainSet& train, LossWeights weights)
    : problem_(std::move(problem)), weights_(weights) {
  domain_points_ = train.domain;
  domain_spec_ = problem_.domain_spec();
  if (domain_spec_.channels(problem_.input_dim()) * problem_.output_dim() > kMaxEntries)
    throw std::logic_error("domain jet exceeds the residual linearization size");

  const int groups = problem_.output_dim() * (1 + problem_.input_dim());
  auto finish = [&](ConditionSet set) {
    std::stable_sort(set.constraints.begin(), set.constraints.end(),
                     [](const Constraint& a, const Constraint& b) { return a.row < b.row; });
    Term t{std::move(set), std::vector<int>(groups, 0)};
    for (const auto& c : t.set.constraints) ++t.group_sizes[ConditionSet::group_of(c, problem_.input_dim())];
    return t;
  };
  initial_ = finish(evaluate_ic_bc(problem_, train.initial, Region::initial));
  boundary_ = finish(evaluate_ic_bc(problem_, train.boundary, Region::boundary));

  if (train.regulator && train.regulator->size() > 0) {
    const auto& reg = *train.regulator;
    reg.validate();
    if (reg.points.cols() != problem_.input_dim() || reg.targets.cols() != problem_.output_dim())
      throw DimensionError("regulator set does not match the problem dimensions");
    ConditionSet set;
    set.points = reg.points;
    for (Eigen::Index i = 0; i < reg.points.rows(); ++i)
      for (int o = 0; o < problem_.output_dim(); ++o)
        set.constraints.push_back({static_cast<std::uint32_t>(i), Constraint::kNoPartner, o, -1,
                                   reg.targets(i, o)});
    data_ = finish(std::move(set));
    has_data_ = true;
    weights_.data *= reg.weight;
  }
}

LossEvaluator::TermResult LossEvaluator::domain_term(const NetworkParams& params, double weight,
                                                     bool with_grad) const {
  TermResult out;
  const Eigen::Index n = domain_points_.rows();
  if (n == 0) return out;
  const std::size_t P = params.values.size();
  const int D = problem_.input_dim();
  const int O = problem_.output_dim();
  const JetSpec& spec = domain_spec_;
  const double scale = weight * 2.0 / static_cast<double>(n);

  auto chunk = [&](Eigen::Index c, ChunkResult& res) {
    const Eigen::Index start = c * kLossChunk;
    const Eigen::Index len = std::min(kLossChunk, n - start);
    JetTape tape;
    tape.record(params, domain_points_.middleRows(start, len), spec);
    const Eigen::MatrixXd& y = tape.output();
    const int B = static_cast<int>(len);
    const int C = tape.channels();
    Eigen::MatrixXd ybar;
    if (with_grad) ybar = Eigen::MatrixXd::Zero(y.rows(), y.cols());

    std::array<Dual, kMaxEntries> e;
    auto entry = [&](int channel, int output) -> const Dual& { return e[channel * O + output]; };
    const int cx = spec.first ? spec.first_channel(0) : 0;
    const int cy = spec.first && D > 2 ? spec.first_channel(1) : 0;
    const int ct = spec.first ? spec.first_channel(D - 1) : 0;
    auto second = [&](int a, int b) {
      const int slot = spec.second_slot(a, b);
      return slot < 0 ? -1 : spec.second_channel(slot, D);
    };
    const int cxx = second(0, 0);
    const int cyy = D > 2 ? second(1, 1) : -1;
    const int ctt = second(D - 1, D - 1);

    for (int i = 0; i < B; ++i) {
      for (int ch = 0; ch < C; ++ch)
        for (int o = 0; o < O; ++o) {
          Dual& d = e[ch * O + o];
          d.v = y(o, ch * B + i);
          d.d.fill(0.0);
          d.d[ch * O + o] = 1.0;
        }
      std::array<Dual, 3> r;
      int eqs = 1;
      switch (problem_.kind) {
        case ProblemKind::burgers1d:
          r[0] = burgers_kernel(entry(0, 0), entry(ct, 0), entry(cx, 0), entry(cxx, 0),
                                problem_.constants.nu);
          break;
        case ProblemKind::wave2d:
          r[0] = wave_kernel(entry(ctt, 0), entry(cxx, 0), entry(cyy, 0), problem_.constants.c);
          break;
        case ProblemKind::ns2d_block: {
          const NsPoint<Dual> q{entry(0, 0),   entry(0, 1),   entry(0, 2),   entry(cx, 0),
                                entry(cy, 0),  entry(ct, 0),  entry(cx, 1),  entry(cy, 1),
                                entry(ct, 1),  entry(cx, 2),  entry(cy, 2),  entry(cxx, 0),
                                entry(cyy, 0), entry(cxx, 1), entry(cyy, 1), entry(cxx, 2),
                                entry(cyy, 2)};
          r = ns_kernel(q, problem_.constants.nu, problem_.constants.rho);
          eqs = 3;
          break;
        }
      }
      for (int q = 0; q < eqs; ++q) {
        res.sum += r[q].v * r[q].v;
        if (!with_grad) continue;
        const double s = scale * r[q].v;
        for (int ch = 0; ch < C; ++ch)
          for (int o = 0; o < O; ++o) ybar(o, ch * B + i) += s * r[q].d[ch * O + o];
      }
    }
    if (with_grad) {
      res.grad.assign(P, 0.0);
      tape.backward(ybar, res.grad);
    }
  };

  const auto parts = for_chunks(n, chunk);
  if (with_grad) out.grad.assign(P, 0.0);
  reduce_into(parts, out.value, out.grad, with_grad);
  out.value /= static_cast<double>(n);
  return out;
}

LossEvaluator::TermResult LossEvaluator::condition_term(const NetworkParams& params, const Term& term,
                                                        double weight, bool with_grad) const {
  TermResult out;
  const auto& set = term.set;
  const Eigen::Index n = set.points.rows();
  if (n == 0 || set.constraints.empty()) return out;
  const std::size_t P = params.values.size();
  const int D = problem_.input_dim();

  // Constraint ranges per chunk (constraints are sorted by row).
  const Eigen::Index chunks = (n + kLossChunk - 1) / kLossChunk;
  std::vector<std::size_t> first(chunks + 1, set.constraints.size());
  {
    std::size_t k = 0;
    for (Eigen::Index c = 0; c < chunks; ++c) {
      while (k < set.constraints.size() && set.constraints[k].row < c * kLossChunk) ++k;
      first[c] = k;
    }
  }

  auto chunk = [&](Eigen::Index c, ChunkResult& res) {
    const Eigen::Index start = c * kLossChunk;
    const Eigen::Index len = std::min(kLossChunk, n - start);
    JetTape tape;
    tape.record(params, set.points.middleRows(start, len), set.spec);
    const Eigen::MatrixXd& y = tape.output();
    const int B = static_cast<int>(len);
    Eigen::MatrixXd ybar;
    if (with_grad) ybar = Eigen::MatrixXd::Zero(y.rows(), y.cols());

    for (std::size_t k = first[c]; k < first[c + 1]; ++k) {
      const Constraint& con = set.constraints[k];
      const int ch = con.axis < 0 ? 0 : set.spec.first_channel(con.axis);
      const Eigen::Index row = con.row - start;
      double m = y(con.output, ch * B + row);
      Eigen::Index partner = -1;
      if (con.partner != Constraint::kNoPartner) {
        partner = static_cast<Eigen::Index>(con.partner) - start;
        if (partner < 0 || partner >= len) throw std::logic_error("paired constraint straddles a chunk");
        m -= y(con.output, ch * B + partner);
      } else {
        m -= con.target;
      }
      const double size = term.group_sizes[ConditionSet::group_of(con, D)];
      res.sum += m * m / size;
      if (!with_grad) continue;
      const double g = weight * 2.0 * m / size;
      ybar(con.output, ch * B + row) += g;
      if (partner >= 0) ybar(con.output, ch * B + partner) -= g;
    }
    if (with_grad) {
      res.grad.assign(P, 0.0);
      tape.backward(ybar, res.grad);
    }
  };

  const auto parts = for_chunks(n, chunk);
  if (with_grad) out.grad.assign(P, 0.0);
  reduce_into(parts, out.value, out.grad, with_grad);
  return out;
}

LossEvaluator::WithGradient LossEvaluator::run(const NetworkParams& params, bool with_grad) const {
  if (params.arch.input_dim != problem_.input_dim() || params.arch.output_dim != problem_.output_dim())
    throw DimensionError("network architecture does not match the problem");
  WithGradient out;
  LossReport& r = out.report;
  r.weights = weights_;

  auto grad_of = [&](double w) { return with_grad && w != 0.0; };
  TermResult dom = domain_term(params, weights_.domain, grad_of(weights_.domain));
  TermResult ini = condition_term(params, initial_, weights_.initial, grad_of(weights_.initial));
  TermResult bnd = condition_term(params, boundary_, weights_.boundary, grad_of(weights_.boundary));
  TermResult dat;
  if (has_data_) dat = condition_term(params, data_, weights_.data, grad_of(weights_.data));

  r.domain = dom.value;
  r.initial = ini.value;
  r.boundary = bnd.value;
  r.data = dat.value;
  const std::pair<const char*, double> terms[] = {
      {"domain", r.domain}, {"initial", r.initial}, {"boundary", r.boundary}, {"data", r.data}};
  for (const auto& [name, v] : terms)
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + name + " loss term");
  r.total = weights_.domain * r.domain + weights_.initial * r.initial +
            weights_.boundary * r.boundary + weights_.data * r.data;

  if (with_grad) {
    out.gradient.assign(params.values.size(), 0.0);
    for (const TermResult* t : {&dom, &ini, &bnd, &dat})
      if (!t->grad.empty())
        for (std::size_t i = 0; i < out.gradient.size(); ++i) out.gradient[i] += t->grad[i];
  }
  return out;
}

LossReport LossEvaluator::evaluate(const NetworkParams& params) const { return run(params, false).report; }

LossEvaluator::WithGradient LossEvaluator::evaluate_with_gradient(const NetworkParams& params) const {
  return run(params, true);
}

LossReport composite_loss(const NetworkParams& params, const PdeProblem& problem, const TrainSet& train,
                          const LossWeights& weights) {
  return LossEvaluator(problem, train, weights).evaluate(params);
}

}  // namespace pinnreg
