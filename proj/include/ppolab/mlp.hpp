#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ppolab/param_vector.hpp"
#include "ppolab/rng.hpp"

namespace ppolab {

// Fully connected net: tanh on hidden layers, identity output. Weight
// matrices are stored row-major as [out x in] segments named
// "<prefix>w<l>" / "<prefix>b<l>".
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;

  int num_layers() const { return static_cast<int>(hidden.size()) + 1; }
  int layer_in(int l) const { return l == 0 ? input_dim : hidden[l - 1]; }
  int layer_out(int l) const {
    return l == static_cast<int>(hidden.size()) ? output_dim : hidden[l];
  }
};

// Registers this net's segments on a layout under the given prefix.
void mlp_add_segments(const MlpSpec& spec, const std::string& prefix, ParamLayout& layout);

// Orthogonal initialization: gaussian fill, thin QR, sign-fixed by diag(R),
// scaled by gain. Hidden layers use gain 1.0, the output layer uses
// output_gain. Biases stay zero.
void mlp_init(const MlpSpec& spec, const std::string& prefix, double output_gain,
              ParamVector& params, Rng& rng);

// Single-sample forward, one matrix-vector product per layer. Rollout
// collection uses this path so that batch composition cannot perturb
// per-environment results.
Eigen::VectorXd mlp_forward(const MlpSpec& spec, const std::string& prefix,
                            const ParamVector& params, const Eigen::VectorXd& x);

// Activations recorded by the batched forward, consumed by the backward pass.
// tanh' is recovered from the stored post-activations as 1 - a^2.
struct MlpTape {
  Eigen::MatrixXd input;                // B x input_dim
  std::vector<Eigen::MatrixXd> hidden;  // B x hidden[l]
};

// Batched forward over row-stacked inputs X (B x input_dim) -> (B x output_dim).
Eigen::MatrixXd mlp_forward_batch(const MlpSpec& spec, const std::string& prefix,
                                  const ParamVector& params, const Eigen::MatrixXd& X,
                                  MlpTape* tape);

// Accumulates dL/dparams into grad (+=) given dL/doutput; returns dL/dinput
// if dX is non-null.
void mlp_backward_batch(const MlpSpec& spec, const std::string& prefix,
                        const ParamVector& params, const MlpTape& tape,
                        const Eigen::MatrixXd& dY, ParamVector& grad,
                        Eigen::MatrixXd* dX = nullptr);

}  // namespace ppolab
