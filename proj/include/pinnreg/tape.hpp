#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pinnreg/net.hpp"

namespace pinnreg::tape {

/// Scalar reverse-mode recording. Every operation appends a node with at
/// most two parents and the local partials towards them; a single reverse
/// sweep then yields the adjoint of every node.
class Tape {
 public:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  std::uint32_t push(std::uint32_t p0, double w0, std::uint32_t p1, double w1);
  std::uint32_t leaf() { return push(kNone, 0.0, kNone, 0.0); }
  std::size_t size() const { return nodes_.size(); }

  /// Adjoints of all nodes with respect to `output`.
  std::vector<double> adjoints(std::uint32_t output) const;

  /// The tape that newly built Vars record onto. One per thread.
  static Tape*& active();

 private:
  struct Node {
    std::uint32_t parent[2];
    double weight[2];
  };
  std::vector<Node> nodes_;
};

/// Installs a fresh tape as the active one for the current scope.
class Scope {
 public:
  Scope() : previous_(Tape::active()) { Tape::active() = &tape_; }
  ~Scope() { Tape::active() = previous_; }
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;
  Tape& tape() { return tape_; }

 private:
  Tape tape_;
  Tape* previous_;
};

/// A recorded scalar. Constants (built from double) carry no tape node.
class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT: implicit constants are the point

  static Var variable(double v);

  double value() const { return value_; }
  std::uint32_t index() const { return index_; }
  bool is_constant() const { return index_ == Tape::kNone; }

  friend Var unary(const Var& x, double value, double dx);
  friend Var binary(const Var& x, const Var& y, double value, double dx, double dy);

 private:
  double value_ = 0.0;
  std::uint32_t index_ = Tape::kNone;
};

Var unary(const Var& x, double value, double dx);
Var binary(const Var& x, const Var& y, double value, double dx, double dy);

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

Var tanh(const Var& x);
Var exp(const Var& x);
Var sin(const Var& x);
Var cos(const Var& x);
Var sqrt(const Var& x);
Var log(const Var& x);

/// Gradient of an arbitrary scalar function of the parameter vector.
/// Throws NumericalError when the function value is non-finite.
std::vector<double> grad_params(const NetworkParams& params,
                                const std::function<Var(std::span<const Var>)>& loss_fn);

}  // namespace pinnreg::tape
