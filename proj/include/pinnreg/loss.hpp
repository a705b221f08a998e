#pragma once

#include <string>
#include <vector>

#include "pinnreg/net.hpp"
#include "pinnreg/pde.hpp"
#include "pinnreg/sampling.hpp"

namespace pinnreg {

struct LossWeights {
  double domain = 1.0;
  double initial = 1.0;
  double boundary = 1.0;
  double data = 1.0;
};

/// Term values and the weights they were combined with. For the data term
/// the reported weight already includes the regulator's own multiplier.
struct LossReport {
  double total = 0.0;
  double domain = 0.0;
  double initial = 0.0;
  double boundary = 0.0;
  double data = 0.0;
  LossWeights weights;
};

/// Composite PINN objective over a fixed set of points. The IC/BC targets
/// and regulator constraints are built once, so repeated evaluations (as in
/// a landscape scan) only pay for the network.
///
/// Each term is a mean square: the domain term sums the per-equation means
/// of squared residuals, the initial/boundary/data terms sum per-component
/// means of squared mismatches.
class LossEvaluator {
 public:
  LossEvaluator(PdeProblem problem, const TrainSet& train, LossWeights weights);

  LossReport evaluate(const NetworkParams& params) const;

  struct WithGradient {
    LossReport report;
    std::vector<double> gradient;
  };
  WithGradient evaluate_with_gradient(const NetworkParams& params) const;

  const PdeProblem& problem() const { return problem_; }

 private:
  struct Term {
    ConditionSet set;
    std::vector<int> group_sizes;
  };
  struct TermResult {
    double value = 0.0;
    std::vector<double> grad;  // already scaled by the term weight
  };

  TermResult domain_term(const NetworkParams& params, double weight, bool with_grad) const;
  TermResult condition_term(const NetworkParams& params, const Term& term, double weight,
                            bool with_grad) const;
  WithGradient run(const NetworkParams& params, bool with_grad) const;

  PdeProblem problem_;
  LossWeights weights_;
  Coords domain_points_;
  JetSpec domain_spec_;
  Term initial_;
  Term boundary_;
  Term data_;
  bool has_data_ = false;
};

LossReport composite_loss(const NetworkParams& params, const PdeProblem& problem,
                          const TrainSet& train, const LossWeights& weights);

/// Points per jet chunk; fixed so reductions are order-stable.
inline constexpr Eigen::Index kLossChunk = 1024;

/// Worker threads for chunk evaluation, from PINNREG_THREADS (default 1).
/// Results do not depend on the thread count.
int loss_threads();
/// Overrides the environment setting; 0 restores it.
void set_loss_threads(int threads);

}  // namespace pinnreg
