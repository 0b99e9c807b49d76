#include "ppolab/gae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppolab {

AdvantageEstimate compute_gae(const TransitionBatch& b, double gamma, double lambda) {
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("compute_gae: gamma and lambda must lie in [0,1]");
  AdvantageEstimate est;
  est.advantages.resize(b.rows());
  for (int n = 0; n < b.N; ++n) {
    double acc = 0.0;
    for (int t = b.T - 1; t >= 0; --t) {
      const int i = b.index(t, n);
      const double not_terminated = b.terminated[i] ? 0.0 : 1.0;
      const double not_done = b.done(i) ? 0.0 : 1.0;
      const double delta =
          b.rewards[i] + gamma * not_terminated * b.next_values[i] - b.values[i];
      acc = delta + gamma * lambda * not_done * acc;
      est.advantages[i] = acc;
    }
  }
  est.value_targets = est.advantages + b.values;
  return est;
}

void normalize_advantages(Eigen::VectorXd& advantages) {
  const auto n = advantages.size();
  if (n == 0) return;
  const double mean = advantages.mean();
  advantages.array() -= mean;
  const double std = std::sqrt(advantages.squaredNorm() / static_cast<double>(n));
  advantages /= std::max(std, 1e-8);
}

}  // namespace ppolab
