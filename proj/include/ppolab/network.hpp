#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "ppolab/env.hpp"
#include "ppolab/mlp.hpp"
#include "ppolab/policy_head.hpp"
#include "ppolab/rng.hpp"

namespace ppolab {

// Separate actor and critic MLPs over one flat parameter vector. Actor
// segments come first (including the gaussian log-std), critic segments
// after, so each optimizer works on a contiguous slice.
struct ActorCritic {
  MlpSpec actor;
  MlpSpec critic;
  PolicyHead head;
  std::shared_ptr<const ParamLayout> layout;
  std::size_t actor_size = 0;   // flat size of the actor slice
  std::size_t critic_size = 0;

  static ActorCritic make(int obs_dim, const PolicyHead& head, const std::vector<int>& hidden);

  // Orthogonal init, gain 1.0 on hidden layers, 0.01 on the policy output,
  // 1.0 on the value output; log-std starts at zero.
  ParamVector init_params(Rng& rng) const;

  Eigen::VectorXd dist_params(const ParamVector& p, const Eigen::VectorXd& obs) const {
    return mlp_forward(actor, "actor.", p, obs);
  }
  double value(const ParamVector& p, const Eigen::VectorXd& obs) const {
    return mlp_forward(critic, "critic.", p, obs)[0];
  }

  // Draws an action and returns its log-probability under the current policy.
  Action sample_action(const ParamVector& p, const Eigen::VectorXd& obs, Rng& rng,
                       double* log_prob) const;

  double log_prob(const ParamVector& p, const Eigen::VectorXd& obs, const Action& a) const;

  Eigen::VectorBlock<Eigen::VectorXd> actor_slice(ParamVector& p) const {
    return p.data().segment(0, static_cast<Eigen::Index>(actor_size));
  }
  Eigen::VectorBlock<Eigen::VectorXd> critic_slice(ParamVector& p) const {
    return p.data().segment(static_cast<Eigen::Index>(actor_size),
                            static_cast<Eigen::Index>(critic_size));
  }
};

}  // namespace ppolab
