#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ppolab/rng.hpp"

namespace ppolab {

struct ActionSpace {
  bool discrete = true;
  int n = 0;           // discrete action count
  int dim = 0;         // continuous action dimensions
  double low = 0.0;    // box bounds (shared across dims)
  double high = 0.0;
};

struct EnvSpec {
  std::string id;
  int obs_dim = 0;
  ActionSpace action;
  int max_episode_steps = 0;
};

// Either a discrete index or a box vector, depending on the env's space.
struct Action {
  int discrete = 0;
  Eigen::VectorXd box;
};

struct StepResult {
  Eigen::VectorXd obs;
  double reward = 0.0;
  bool terminated = false;  // reached a terminal state; no bootstrap
  bool truncated = false;   // hit the step cap; value bootstrap applies
};

// Episodic environment with an internal RNG stream. reset(seed) reseeds the
// stream and starts an episode; reset_continue() starts the next episode from
// the same stream (used by auto-resetting rollouts). Dynamics are
// deterministic given (seed, action sequence).
class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }

  Eigen::VectorXd reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    return reset_continue();
  }

  Eigen::VectorXd reset_continue() {
    steps_ = 0;
    return do_reset();
  }

  // Continuous actions outside the box are clamped and counted in
  // clamp_warnings(); invalid discrete actions throw.
  StepResult step(const Action& a);

  virtual Eigen::VectorXd observation() const = 0;

  // Serializable snapshot of the physical state (without rng/step counters).
  virtual std::vector<double> state() const = 0;
  virtual void set_state(const std::vector<double>& s) = 0;

  int steps_elapsed() const { return steps_; }
  void set_steps_elapsed(int s) { steps_ = s; }
  std::uint64_t rng_state() const { return rng_.state(); }
  void set_rng_state(std::uint64_t s) { rng_.set_state(s); }
  std::uint64_t clamp_warnings() const { return clamp_warnings_; }

 protected:
  explicit Env(EnvSpec spec) : spec_(std::move(spec)) {}

  // Samples a fresh initial state from rng_ and returns the first observation.
  virtual Eigen::VectorXd do_reset() = 0;
  // Advances the physical state; fills reward/terminated of the result.
  virtual void do_step(const Action& a, StepResult& r) = 0;

  EnvSpec spec_;
  Rng rng_{0};

 private:
  int steps_ = 0;
  std::uint64_t clamp_warnings_ = 0;
};

// Known ids: chain-mdp, cartpole-discrete, pendulum-continuous, maze-grid.
// Unknown ids throw std::invalid_argument.
std::unique_ptr<Env> make_env(const std::string& id);
std::vector<std::string> env_ids();

inline Eigen::VectorXd env_reset(Env& env, std::uint64_t seed) { return env.reset(seed); }
inline StepResult env_step(Env& env, const Action& a) { return env.step(a); }

}  // namespace ppolab
