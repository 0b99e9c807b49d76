#include "ppolab/policy_head.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ppolab {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

double logsumexp(const Eigen::VectorXd& z) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}
}  // namespace

double categorical_log_prob(const Eigen::VectorXd& logits, int action) {
  if (action < 0 || action >= logits.size())
    throw std::out_of_range("categorical_log_prob: action out of range");
  return logits[action] - logsumexp(logits);
}

double categorical_entropy(const Eigen::VectorXd& logits) {
  const double lse = logsumexp(logits);
  const Eigen::ArrayXd p = (logits.array() - lse).exp();
  return lse - (p * logits.array()).sum();
}

Eigen::VectorXd categorical_log_prob_grad(const Eigen::VectorXd& logits, int action) {
  const double lse = logsumexp(logits);
  Eigen::VectorXd g = -(logits.array() - lse).exp();
  g[action] += 1.0;
  return g;
}

int categorical_sample(const Eigen::VectorXd& logits, Rng& rng) {
  const double lse = logsumexp(logits);
  const Eigen::ArrayXd p = (logits.array() - lse).exp();
  const double u = rng.next_double();
  double cum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    cum += p[i];
    if (u < cum) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action) {
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  const Eigen::ArrayXd z = (action - mean).array() * inv_std;
  return -0.5 * z.square().sum() - log_std.sum() -
         0.5 * kLogTwoPi * static_cast<double>(mean.size());
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * (kLogTwoPi + 1.0) * static_cast<double>(log_std.size());
}

void gaussian_log_prob_grad(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                            const Eigen::VectorXd& action, Eigen::VectorXd& d_mean,
                            Eigen::VectorXd& d_log_std) {
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  const Eigen::ArrayXd z = (action - mean).array() * inv_std;
  d_mean = (z * inv_std).matrix();
  d_log_std = (z.square() - 1.0).matrix();
}

Eigen::VectorXd gaussian_sample(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                                Rng& rng) {
  Eigen::VectorXd a(mean.size());
  for (int i = 0; i < mean.size(); ++i)
    a[i] = mean[i] + std::exp(log_std[i]) * rng.next_gaussian();
  return a;
}

void categorical_log_prob_entropy_batch(const Eigen::MatrixXd& logits,
                                        const Eigen::VectorXi& actions,
                                        Eigen::VectorXd& log_probs, Eigen::VectorXd& entropy) {
  const Eigen::Index B = logits.rows();
  log_probs.resize(B);
  entropy.resize(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const Eigen::VectorXd z = logits.row(b).transpose();
    const double lse = logsumexp(z);
    log_probs[b] = z[actions[b]] - lse;
    const Eigen::ArrayXd p = (z.array() - lse).exp();
    entropy[b] = lse - (p * z.array()).sum();
  }
}

Eigen::MatrixXd categorical_log_prob_backward_batch(const Eigen::MatrixXd& logits,
                                                    const Eigen::VectorXi& actions,
                                                    const Eigen::VectorXd& coeff) {
  Eigen::MatrixXd d(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.rows(); ++b) {
    const Eigen::VectorXd z = logits.row(b).transpose();
    const double lse = logsumexp(z);
    Eigen::ArrayXd g = -(z.array() - lse).exp();
    g[actions[b]] += 1.0;
    d.row(b) = (coeff[b] * g).transpose();
  }
  return d;
}

void gaussian_log_prob_entropy_batch(const Eigen::MatrixXd& means,
                                     const Eigen::VectorXd& log_std,
                                     const Eigen::MatrixXd& actions,
                                     Eigen::VectorXd& log_probs, Eigen::VectorXd& entropy) {
  const Eigen::Index B = means.rows();
  const double d = static_cast<double>(means.cols());
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  const double ent = gaussian_entropy(log_std);
  log_probs.resize(B);
  entropy.setConstant(B, ent);
  for (Eigen::Index b = 0; b < B; ++b) {
    const Eigen::ArrayXd z =
        (actions.row(b) - means.row(b)).transpose().array() * inv_std;
    log_probs[b] = -0.5 * z.square().sum() - log_std.sum() - 0.5 * kLogTwoPi * d;
  }
}

void gaussian_log_prob_backward_batch(const Eigen::MatrixXd& means,
                                      const Eigen::VectorXd& log_std,
                                      const Eigen::MatrixXd& actions,
                                      const Eigen::VectorXd& coeff, Eigen::MatrixXd& d_means,
                                      Eigen::VectorXd& d_log_std) {
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  d_means.resize(means.rows(), means.cols());
  d_log_std = Eigen::VectorXd::Zero(log_std.size());
  for (Eigen::Index b = 0; b < means.rows(); ++b) {
    const Eigen::ArrayXd z =
        (actions.row(b) - means.row(b)).transpose().array() * inv_std;
    d_means.row(b) = (coeff[b] * z * inv_std).transpose();
    d_log_std.array() += coeff[b] * (z.square() - 1.0);
  }
}

}  // namespace ppolab
