#include "ppolab/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ppolab {

StepResult Env::step(const Action& a) {
  Action applied = a;
  if (spec_.action.discrete) {
    if (a.discrete < 0 || a.discrete >= spec_.action.n)
      throw std::out_of_range("action " + std::to_string(a.discrete) + " outside [0," +
                              std::to_string(spec_.action.n) + ") for " + spec_.id);
  } else {
    if (a.box.size() != spec_.action.dim)
      throw std::invalid_argument("action dim mismatch for " + spec_.id);
    bool clamped = false;
    applied.box = a.box;
    for (int i = 0; i < applied.box.size(); ++i) {
      if (applied.box[i] < spec_.action.low || applied.box[i] > spec_.action.high) {
        applied.box[i] = std::clamp(applied.box[i], spec_.action.low, spec_.action.high);
        clamped = true;
      }
    }
    if (clamped) ++clamp_warnings_;
  }
  StepResult r;
  do_step(applied, r);
  ++steps_;
  r.truncated = !r.terminated && steps_ >= spec_.max_episode_steps;
  r.obs = observation();
  return r;
}

namespace {

// Five states in a row, observation one-hot. Action 1 moves right, 0 moves
// left, both saturating at the ends. Reaching the right end pays 1 and ends
// the episode; otherwise the episode is cut after 20 steps. Reset always
// starts at the left end.
class ChainMdp final : public Env {
 public:
  ChainMdp() : Env({"chain-mdp", kStates, {true, 2, 0, 0.0, 0.0}, 20}) {}

  Eigen::VectorXd observation() const override {
    Eigen::VectorXd o = Eigen::VectorXd::Zero(kStates);
    o[pos_] = 1.0;
    return o;
  }
  std::vector<double> state() const override { return {static_cast<double>(pos_)}; }
  void set_state(const std::vector<double>& s) override { pos_ = static_cast<int>(s.at(0)); }

 protected:
  Eigen::VectorXd do_reset() override {
    pos_ = 0;
    return observation();
  }
  void do_step(const Action& a, StepResult& r) override {
    pos_ = a.discrete == 1 ? std::min(pos_ + 1, kStates - 1) : std::max(pos_ - 1, 0);
    r.terminated = pos_ == kStates - 1;
    r.reward = r.terminated ? 1.0 : 0.0;
  }

 private:
  static constexpr int kStates = 5;
  int pos_ = 0;
};

// Pole balancing with the classic constants: force +-10 N, Euler integration
// at dt = 0.02, failure at |x| > 2.4 or |theta| > 12 degrees, reward 1 every
// step including the failing one, 500-step cap. Initial state uniform in
// [-0.05, 0.05] on all four coordinates.
class CartPole final : public Env {
 public:
  CartPole() : Env({"cartpole-discrete", 4, {true, 2, 0, 0.0, 0.0}, 500}) {}

  Eigen::VectorXd observation() const override {
    Eigen::VectorXd o(4);
    o << x_, x_dot_, theta_, theta_dot_;
    return o;
  }
  std::vector<double> state() const override { return {x_, x_dot_, theta_, theta_dot_}; }
  void set_state(const std::vector<double>& s) override {
    x_ = s.at(0);
    x_dot_ = s.at(1);
    theta_ = s.at(2);
    theta_dot_ = s.at(3);
  }

 protected:
  Eigen::VectorXd do_reset() override {
    x_ = rng_.uniform(-0.05, 0.05);
    x_dot_ = rng_.uniform(-0.05, 0.05);
    theta_ = rng_.uniform(-0.05, 0.05);
    theta_dot_ = rng_.uniform(-0.05, 0.05);
    return observation();
  }
  void do_step(const Action& a, StepResult& r) override {
    const double force = a.discrete == 1 ? kForceMag : -kForceMag;
    const double cos_t = std::cos(theta_);
    const double sin_t = std::sin(theta_);
    const double temp =
        (force + kPoleMassLength * theta_dot_ * theta_dot_ * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
    x_ += kTau * x_dot_;
    x_dot_ += kTau * x_acc;
    theta_ += kTau * theta_dot_;
    theta_dot_ += kTau * theta_acc;
    r.terminated = x_ < -kXThreshold || x_ > kXThreshold || theta_ < -kThetaThreshold ||
                   theta_ > kThetaThreshold;
    r.reward = 1.0;
  }

 private:
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kTotalMass = kMassCart + kMassPole;
  static constexpr double kLength = 0.5;  // half the pole length
  static constexpr double kPoleMassLength = kMassPole * kLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * std::numbers::pi / 360.0;
  static constexpr double kXThreshold = 2.4;
  double x_ = 0, x_dot_ = 0, theta_ = 0, theta_dot_ = 0;
};

// Torque-controlled pendulum swing-up: g = 10, m = 1, l = 1, dt = 0.05,
// torque box [-2, 2], angular velocity clamped to +-8. Cost is
// angle^2 + 0.1 thdot^2 + 0.001 u^2 with the angle wrapped to (-pi, pi];
// episodes only truncate (200 steps), they never terminate.
class Pendulum final : public Env {
 public:
  Pendulum() : Env({"pendulum-continuous", 3, {false, 0, 1, -2.0, 2.0}, 200}) {}

  Eigen::VectorXd observation() const override {
    Eigen::VectorXd o(3);
    o << std::cos(theta_), std::sin(theta_), theta_dot_;
    return o;
  }
  std::vector<double> state() const override { return {theta_, theta_dot_}; }
  void set_state(const std::vector<double>& s) override {
    theta_ = s.at(0);
    theta_dot_ = s.at(1);
  }

 protected:
  Eigen::VectorXd do_reset() override {
    theta_ = rng_.uniform(-std::numbers::pi, std::numbers::pi);
    theta_dot_ = rng_.uniform(-1.0, 1.0);
    return observation();
  }
  void do_step(const Action& a, StepResult& r) override {
    const double u = a.box[0];
    const double angle = wrap(theta_);
    r.reward = -(angle * angle + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);
    theta_dot_ += (3.0 * kG / (2.0 * kL) * std::sin(theta_) + 3.0 / (kM * kL * kL) * u) * kDt;
    theta_dot_ = std::clamp(theta_dot_, -kMaxSpeed, kMaxSpeed);
    theta_ += theta_dot_ * kDt;
    r.terminated = false;
  }

 private:
  static double wrap(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x + std::numbers::pi, two_pi);
    if (x < 0) x += two_pi;
    return x - std::numbers::pi;
  }
  static constexpr double kG = 10.0, kM = 1.0, kL = 1.0, kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;
  double theta_ = 0, theta_dot_ = 0;
};

// 5x5 gridworld with interior walls. Observation is a one-hot of the agent
// cell. Actions are up/right/down/left; bumping a wall or the border leaves
// the agent in place. Reaching the goal pays 1 and terminates; otherwise the
// episode is cut after 50 steps. Reset places the agent uniformly over free
// cells, goal excluded (an episode must start with at least one step to take).
class MazeGrid final : public Env {
 public:
  MazeGrid() : Env({"maze-grid", kSize * kSize, {true, 4, 0, 0.0, 0.0}, 50}) {
    for (int r = 0; r < kSize; ++r)
      for (int c = 0; c < kSize; ++c)
        if (!kWalls[r][c] && !(r == kGoalRow && c == kGoalCol))
          start_cells_.push_back({r, c});
  }

  Eigen::VectorXd observation() const override {
    Eigen::VectorXd o = Eigen::VectorXd::Zero(kSize * kSize);
    o[row_ * kSize + col_] = 1.0;
    return o;
  }
  std::vector<double> state() const override {
    return {static_cast<double>(row_), static_cast<double>(col_)};
  }
  void set_state(const std::vector<double>& s) override {
    row_ = static_cast<int>(s.at(0));
    col_ = static_cast<int>(s.at(1));
  }

  static int num_start_cells() { return 17; }

 protected:
  Eigen::VectorXd do_reset() override {
    const auto& cell = start_cells_[rng_.below(start_cells_.size())];
    row_ = cell.first;
    col_ = cell.second;
    return observation();
  }
  void do_step(const Action& a, StepResult& r) override {
    static constexpr int dr[4] = {-1, 0, 1, 0};
    static constexpr int dc[4] = {0, 1, 0, -1};
    const int nr = row_ + dr[a.discrete];
    const int nc = col_ + dc[a.discrete];
    if (nr >= 0 && nr < kSize && nc >= 0 && nc < kSize && !kWalls[nr][nc]) {
      row_ = nr;
      col_ = nc;
    }
    r.terminated = row_ == kGoalRow && col_ == kGoalCol;
    r.reward = r.terminated ? 1.0 : 0.0;
  }

 private:
  static constexpr int kSize = 5;
  static constexpr int kGoalRow = 0, kGoalCol = 4;
  static constexpr bool kWalls[kSize][kSize] = {
      {false, false, false, true, false},
      {false, true, false, true, false},
      {false, true, false, false, false},
      {false, true, true, true, false},
      {false, false, false, false, false},
  };
  int row_ = 0, col_ = 0;
  std::vector<std::pair<int, int>> start_cells_;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& id) {
  if (id == "chain-mdp") return std::make_unique<ChainMdp>();
  if (id == "cartpole-discrete") return std::make_unique<CartPole>();
  if (id == "pendulum-continuous") return std::make_unique<Pendulum>();
  if (id == "maze-grid") return std::make_unique<MazeGrid>();
  throw std::invalid_argument("unknown environment id: " + id);
}

std::vector<std::string> env_ids() {
  return {"chain-mdp", "cartpole-discrete", "pendulum-continuous", "maze-grid"};
}

}  // namespace ppolab
