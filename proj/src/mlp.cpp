#include "ppolab/mlp.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace ppolab {

namespace {
std::string wname(const std::string& prefix, int l) { return prefix + "w" + std::to_string(l); }
std::string bname(const std::string& prefix, int l) { return prefix + "b" + std::to_string(l); }
}  // namespace

void mlp_add_segments(const MlpSpec& spec, const std::string& prefix, ParamLayout& layout) {
  if (spec.input_dim <= 0 || spec.output_dim <= 0)
    throw std::invalid_argument("mlp dims must be positive");
  for (int l = 0; l < spec.num_layers(); ++l) {
    layout.add(wname(prefix, l), spec.layer_out(l), spec.layer_in(l));
    layout.add(bname(prefix, l), spec.layer_out(l));
  }
}

namespace {

// Orthogonal matrix of shape (rows x cols): gaussian fill in row-major draw
// order, thin QR of the tall orientation, columns sign-fixed so diag(R) > 0.
Eigen::MatrixXd orthogonal(int rows, int cols, double gain, Rng& rng) {
  const int m = std::max(rows, cols);
  const int n = std::min(rows, cols);
  Eigen::MatrixXd g(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, n);
  Eigen::MatrixXd r = qr.matrixQR().topRows(n);
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  q *= gain;
  if (rows < cols) return q.transpose();
  return q;
}

}  // namespace

void mlp_init(const MlpSpec& spec, const std::string& prefix, double output_gain,
              ParamVector& params, Rng& rng) {
  for (int l = 0; l < spec.num_layers(); ++l) {
    const bool last = l == spec.num_layers() - 1;
    const double gain = last ? output_gain : 1.0;
    params.matrix(wname(prefix, l)) = orthogonal(spec.layer_out(l), spec.layer_in(l), gain, rng);
    params.vector(bname(prefix, l)).setZero();
  }
}

Eigen::VectorXd mlp_forward(const MlpSpec& spec, const std::string& prefix,
                            const ParamVector& params, const Eigen::VectorXd& x) {
  Eigen::VectorXd a = x;
  for (int l = 0; l < spec.num_layers(); ++l) {
    Eigen::VectorXd z = params.matrix(wname(prefix, l)) * a + params.vector(bname(prefix, l));
    if (l < spec.num_layers() - 1) z = z.array().tanh();
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd mlp_forward_batch(const MlpSpec& spec, const std::string& prefix,
                                  const ParamVector& params, const Eigen::MatrixXd& X,
                                  MlpTape* tape) {
  if (tape) {
    tape->input = X;
    tape->hidden.clear();
  }
  Eigen::MatrixXd a = X;
  for (int l = 0; l < spec.num_layers(); ++l) {
    Eigen::MatrixXd z =
        (a * params.matrix(wname(prefix, l)).transpose()).rowwise() +
        params.vector(bname(prefix, l)).transpose();
    if (l < spec.num_layers() - 1) {
      z = z.array().tanh();
      if (tape) tape->hidden.push_back(z);
    }
    a = std::move(z);
  }
  return a;
}

void mlp_backward_batch(const MlpSpec& spec, const std::string& prefix,
                        const ParamVector& params, const MlpTape& tape,
                        const Eigen::MatrixXd& dY, ParamVector& grad,
                        Eigen::MatrixXd* dX) {
  const int L = spec.num_layers();
  if (static_cast<int>(tape.hidden.size()) != L - 1)
    throw std::invalid_argument("mlp_backward_batch: tape does not match spec");
  Eigen::MatrixXd d = dY;
  for (int l = L - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = l == 0 ? tape.input : tape.hidden[l - 1];
    grad.matrix(wname(prefix, l)) += d.transpose() * in;
    grad.vector(bname(prefix, l)) += d.colwise().sum().transpose();
    if (l > 0 || dX) {
      Eigen::MatrixXd dprev = d * params.matrix(wname(prefix, l));
      if (l > 0) dprev.array() *= 1.0 - tape.hidden[l - 1].array().square();
      d = std::move(dprev);
    }
  }
  if (dX) *dX = d;
}

}  // namespace ppolab
