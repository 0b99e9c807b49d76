#pragma once

#include <Eigen/Core>

#include "ppolab/rng.hpp"

namespace ppolab {

// Action distribution families. Categorical heads read logits from the actor
// net output; gaussian heads read the mean from the net output and a
// state-independent log-std vector stored as its own parameter segment.
enum class HeadKind { categorical, gaussian };

struct PolicyHead {
  HeadKind kind = HeadKind::categorical;
  int dim = 0;  // number of actions (categorical) or action dimensions (gaussian)
};

// ---- categorical -----------------------------------------------------------

// log softmax(z)[a] evaluated stably via logsumexp.
double categorical_log_prob(const Eigen::VectorXd& logits, int action);

// H = logsumexp(z) - sum_i p_i z_i.
double categorical_entropy(const Eigen::VectorXd& logits);

// d log pi(a|z) / dz = onehot(a) - softmax(z).
Eigen::VectorXd categorical_log_prob_grad(const Eigen::VectorXd& logits, int action);

// Inverse-CDF sample using one uniform draw.
int categorical_sample(const Eigen::VectorXd& logits, Rng& rng);

// ---- diagonal gaussian ------------------------------------------------------

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action);

// H = sum_i (log_std_i + 0.5 log(2 pi e)).
double gaussian_entropy(const Eigen::VectorXd& log_std);

// d log p / d mean and d log p / d log_std at the given action.
void gaussian_log_prob_grad(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                            const Eigen::VectorXd& action, Eigen::VectorXd& d_mean,
                            Eigen::VectorXd& d_log_std);

// mean + exp(log_std) * z with one gaussian draw per dimension.
Eigen::VectorXd gaussian_sample(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                                Rng& rng);

// ---- batched forms used by the surrogate losses -----------------------------

// Categorical over row-stacked logits (B x n), integer actions (B).
void categorical_log_prob_entropy_batch(const Eigen::MatrixXd& logits,
                                        const Eigen::VectorXi& actions,
                                        Eigen::VectorXd& log_probs, Eigen::VectorXd& entropy);

// dL/dlogits given per-sample coefficients c: rows c_b * (onehot(a_b) - softmax(z_b)).
Eigen::MatrixXd categorical_log_prob_backward_batch(const Eigen::MatrixXd& logits,
                                                    const Eigen::VectorXi& actions,
                                                    const Eigen::VectorXd& coeff);

// Gaussian over row-stacked means (B x d), shared log_std (d), actions (B x d).
void gaussian_log_prob_entropy_batch(const Eigen::MatrixXd& means,
                                     const Eigen::VectorXd& log_std,
                                     const Eigen::MatrixXd& actions,
                                     Eigen::VectorXd& log_probs, Eigen::VectorXd& entropy);

// dL/dmeans (B x d) and accumulated dL/dlog_std (d) given per-sample coefficients.
void gaussian_log_prob_backward_batch(const Eigen::MatrixXd& means,
                                      const Eigen::VectorXd& log_std,
                                      const Eigen::MatrixXd& actions,
                                      const Eigen::VectorXd& coeff, Eigen::MatrixXd& d_means,
                                      Eigen::VectorXd& d_log_std);

}  // namespace ppolab
