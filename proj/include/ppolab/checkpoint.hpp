#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppolab/adam.hpp"
#include "ppolab/outer.hpp"
#include "ppolab/param_vector.hpp"

namespace ppolab {

// One outer iteration's training diagnostics, kept for the run summary and
// the event stream.
struct IterationDiag {
  std::uint64_t iteration = 0;
  std::uint64_t transitions = 0;
  double outer_grad_norm = 0.0;
  double momentum_effect_norm = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  double active_fraction = 0.0;
  double entropy = 0.0;
};

// One evaluation of the current policy during training.
struct EvalPoint {
  std::uint64_t index = 0;
  std::uint64_t transitions = 0;
  double mean_return = 0.0;
};

// Complete mid-run training state. Saving and reloading this reproduces the
// remainder of a run bit for bit: parameters, outer and Adam optimizer
// state, every random-number cursor, the simulator states of the vectorized
// training environments, and the bookkeeping that feeds the run summary.
struct Checkpoint {
  std::string env_id;
  ParamVector theta;
  OuterState outer;
  AdamState adam_actor;
  AdamState adam_critic;

  std::uint64_t inner_rng_state = 0;  // minibatch shuffling stream
  std::vector<std::uint64_t> env_rng_states;
  std::vector<std::uint64_t> action_rng_states;
  std::vector<std::uint64_t> env_steps;
  std::vector<Eigen::VectorXd> env_states;
  Eigen::VectorXd tracker_returns;  // running per-env episode return
  Eigen::VectorXd tracker_lengths;

  std::uint64_t iterations_done = 0;
  std::uint64_t transitions_done = 0;
  std::uint64_t next_eval = 0;

  std::vector<EvalPoint> eval_points;
  std::vector<IterationDiag> diagnostics;
  double best_mean = 0.0;
  std::uint64_t best_eval_index = 0;
  ParamVector best_theta;
};

// Binary file layout (all integers little-endian):
//   bytes 0-7   magic "PPOLABCK"
//   bytes 8-11  format version (u32, currently 1)
//   parameter layout table: u32 segment count, then per segment
//     u32 name length + name bytes, u64 offset, u64 size, i32 rows, i32 cols
//   the remaining sections in the order of the Checkpoint fields, vectors
//   written as u64 count + raw IEEE-754 bit patterns (doubles as u64)
// Raw bit patterns make the round trip exact, signed zeros included.
void checkpoint_save(const std::string& path, const Checkpoint& ck);

// Throws std::runtime_error naming the problem on a missing file, foreign or
// corrupted header, unsupported version, or truncated payload.
Checkpoint checkpoint_load(const std::string& path);

}  // namespace ppolab
