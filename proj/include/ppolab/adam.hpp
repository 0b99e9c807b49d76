#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace ppolab {

enum class LrSchedule { constant, linear_to_zero };

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double max_grad_norm = 0.5;
  LrSchedule schedule = LrSchedule::constant;
  std::uint64_t total_steps = 0;  // schedule horizon for linear_to_zero
};

// First/second moment accumulators plus the step counter. The same state
// object persists across outer iterations unless the caller resets it.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const AdamConfig& cfg, Eigen::Index dim)
      : cfg_(cfg), m1_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

  const AdamConfig& config() const { return cfg_; }
  std::uint64_t step_count() const { return step_; }
  const Eigen::VectorXd& m1() const { return m1_; }
  const Eigen::VectorXd& m2() const { return m2_; }
  Eigen::VectorXd& m1() { return m1_; }
  Eigen::VectorXd& m2() { return m2_; }
  void set_step_count(std::uint64_t s) { step_ = s; }

  // Learning rate the next update will use. Under linear_to_zero this is
  // lr * (1 - step/total), clamped at zero, so it reads 0 once the scheduled
  // number of steps has been taken.
  double effective_lr() const;

  void reset() {
    m1_.setZero();
    m2_.setZero();
    step_ = 0;
  }

 private:
  friend bool adam_step(Eigen::Ref<Eigen::VectorXd>, const Eigen::VectorXd&, AdamState&);
  AdamConfig cfg_;
  Eigen::VectorXd m1_, m2_;
  std::uint64_t step_ = 0;
};

// One Adam update on params. The gradient is first rescaled to global L2 norm
// at most max_grad_norm, then applied with bias correction at the scheduled
// learning rate. Returns false and leaves params and state untouched when the
// gradient is not finite.
bool adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad,
               AdamState& state);

}  // namespace ppolab
