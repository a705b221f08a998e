#include "pinnreg/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "pinnreg/error.hpp"

namespace pinnreg::tape {

Tape*& Tape::active() {
  thread_local Tape* current = nullptr;
  return current;
}

std::uint32_t Tape::push(std::uint32_t p0, double w0, std::uint32_t p1, double w1) {
  if (nodes_.size() >= kNone) throw std::length_error("tape exhausted");
  nodes_.push_back({{p0, p1}, {w0, w1}});
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::vector<double> Tape::adjoints(std::uint32_t output) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  if (output == kNone) return adj;
  adj[output] = 1.0;
  for (std::size_t i = output + 1; i-- > 0;) {
    const double a = adj[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    for (int k = 0; k < 2; ++k)
      if (n.parent[k] != kNone) adj[n.parent[k]] += a * n.weight[k];
  }
  return adj;
}

Var Var::variable(double v) {
  Tape* t = Tape::active();
  if (t == nullptr) throw std::logic_error("Var::variable without an active tape");
  Var out(v);
  out.index_ = t->leaf();
  return out;
}

Var unary(const Var& x, double value, double dx) {
  Var out(value);
  if (!x.is_constant()) out.index_ = Tape::active()->push(x.index_, dx, Tape::kNone, 0.0);
  return out;
}

Var binary(const Var& x, const Var& y, double value, double dx, double dy) {
  Var out(value);
  if (x.is_constant() && y.is_constant()) return out;
  out.index_ = Tape::active()->push(x.is_constant() ? Tape::kNone : x.index_, dx,
                                    y.is_constant() ? Tape::kNone : y.index_, dy);
  return out;
}

Var operator+(const Var& a, const Var& b) {
  return binary(a, b, a.value() + b.value(), 1.0, 1.0);
}
Var operator-(const Var& a, const Var& b) {
  return binary(a, b, a.value() - b.value(), 1.0, -1.0);
}
Var operator*(const Var& a, const Var& b) {
  return binary(a, b, a.value() * b.value(), b.value(), a.value());
}
Var operator/(const Var& a, const Var& b) {
  const double q = a.value() / b.value();
  return binary(a, b, q, 1.0 / b.value(), -q / b.value());
}
Var operator-(const Var& a) { return unary(a, -a.value(), -1.0); }

Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return unary(x, t, 1.0 - t * t);
}
Var exp(const Var& x) {
  const double e = std::exp(x.value());
  return unary(x, e, e);
}
Var sin(const Var& x) { return unary(x, std::sin(x.value()), std::cos(x.value())); }
Var cos(const Var& x) { return unary(x, std::cos(x.value()), -std::sin(x.value())); }
Var sqrt(const Var& x) {
  const double r = std::sqrt(x.value());
  return unary(x, r, 0.5 / r);
}
Var log(const Var& x) { return unary(x, std::log(x.value()), 1.0 / x.value()); }

std::vector<double> grad_params(const NetworkParams& params,
                                const std::function<Var(std::span<const Var>)>& loss_fn) {
  Scope scope;
  std::vector<Var> vars;
  vars.reserve(params.values.size());
  for (double v : params.values) vars.push_back(Var::variable(v));
  const Var loss = loss_fn(vars);
  if (!std::isfinite(loss.value())) throw NumericalError("grad_params: non-finite loss value");

  std::vector<double> grad(vars.size(), 0.0);
  if (loss.is_constant()) return grad;
  const auto adj = scope.tape().adjoints(loss.index());
  for (std::size_t i = 0; i < vars.size(); ++i) grad[i] = adj[vars[i].index()];
  return grad;
}

}  // namespace pinnreg::tape
