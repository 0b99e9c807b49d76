#include "ppolab/network.hpp"

#include <stdexcept>

namespace ppolab {

ActorCritic ActorCritic::make(int obs_dim, const PolicyHead& head,
                              const std::vector<int>& hidden) {
  if (head.dim <= 0) throw std::invalid_argument("policy head dim must be positive");
  ActorCritic net;
  net.head = head;
  net.actor = {obs_dim, hidden, head.dim};
  net.critic = {obs_dim, hidden, 1};
  auto layout = std::make_shared<ParamLayout>();
  mlp_add_segments(net.actor, "actor.", *layout);
  if (head.kind == HeadKind::gaussian) layout->add("actor.log_std", head.dim);
  net.actor_size = layout->total_size();
  mlp_add_segments(net.critic, "critic.", *layout);
  net.critic_size = layout->total_size() - net.actor_size;
  net.layout = std::move(layout);
  return net;
}

ParamVector ActorCritic::init_params(Rng& rng) const {
  ParamVector p(layout);
  mlp_init(actor, "actor.", 0.01, p, rng);
  if (head.kind == HeadKind::gaussian) p.vector("actor.log_std").setZero();
  mlp_init(critic, "critic.", 1.0, p, rng);
  return p;
}

Action ActorCritic::sample_action(const ParamVector& p, const Eigen::VectorXd& obs, Rng& rng,
                                  double* log_prob) const {
  const Eigen::VectorXd dp = dist_params(p, obs);
  Action a;
  if (head.kind == HeadKind::categorical) {
    a.discrete = categorical_sample(dp, rng);
    if (log_prob) *log_prob = categorical_log_prob(dp, a.discrete);
  } else {
    const Eigen::VectorXd ls = p.vector("actor.log_std");
    a.box = gaussian_sample(dp, ls, rng);
    if (log_prob) *log_prob = gaussian_log_prob(dp, ls, a.box);
  }
  return a;
}

double ActorCritic::log_prob(const ParamVector& p, const Eigen::VectorXd& obs,
                             const Action& a) const {
  const Eigen::VectorXd dp = dist_params(p, obs);
  if (head.kind == HeadKind::categorical) return categorical_log_prob(dp, a.discrete);
  return gaussian_log_prob(dp, p.vector("actor.log_std"), a.box);
}

}  // namespace ppolab
