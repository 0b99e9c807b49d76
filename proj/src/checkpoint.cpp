#include "ppolab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ppolab {

namespace {

constexpr char kMagic[8] = {'P', 'P', 'O', 'L', 'A', 'B', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  }

  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    raw(b, 4);
  }
  void u64(std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    raw(b, 8);
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void vec(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void vec(const std::vector<std::uint64_t>& v) {
    u64(v.size());
    for (std::uint64_t x : v) u64(x);
  }
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("checkpoint: write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  }

  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint8_t b[4];
    raw(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint8_t b[8];
    raw(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw std::runtime_error("checkpoint: implausible string length");
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  Eigen::VectorXd vec() {
    const std::uint64_t n = u64();
    if (n > (1ull << 32)) throw std::runtime_error("checkpoint: implausible vector length");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }
  std::vector<std::uint64_t> vec_u64() {
    const std::uint64_t n = u64();
    if (n > (1ull << 32)) throw std::runtime_error("checkpoint: implausible vector length");
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = u64();
    return v;
  }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw std::runtime_error("checkpoint: truncated file");
  }

 private:
  std::ifstream in_;
};

void write_layout(Writer& w, const ParamLayout& layout) {
  const auto& segs = layout.segments();
  w.u32(static_cast<std::uint32_t>(segs.size()));
  for (const SegmentInfo& s : segs) {
    w.str(s.name);
    w.u64(s.offset);
    w.u64(s.size);
    w.i32(s.rows);
    w.i32(s.cols);
  }
}

std::shared_ptr<const ParamLayout> read_layout(Reader& r) {
  const std::uint32_t count = r.u32();
  if (count > (1u << 16)) throw std::runtime_error("checkpoint: implausible layout table");
  auto layout = std::make_shared<ParamLayout>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str();
    const std::uint64_t offset = r.u64();
    const std::uint64_t size = r.u64();
    const std::int32_t rows = r.i32();
    const std::int32_t cols = r.i32();
    const std::size_t idx = layout->add(name, rows, cols);
    const SegmentInfo& added = layout->segments()[idx];
    if (added.offset != offset || added.size != size)
      throw std::runtime_error("checkpoint: inconsistent layout table");
  }
  return layout;
}

void write_params(Writer& w, const ParamVector& p) { w.vec(p.data()); }

ParamVector read_params(Reader& r, std::shared_ptr<const ParamLayout> layout) {
  ParamVector p(std::move(layout));
  const Eigen::VectorXd data = r.vec();
  if (data.size() != p.data().size())
    throw std::runtime_error("checkpoint: parameter block does not match layout");
  p.data() = data;
  return p;
}

void write_adam(Writer& w, const AdamState& a) {
  const AdamConfig& c = a.config();
  w.f64(c.lr);
  w.f64(c.beta1);
  w.f64(c.beta2);
  w.f64(c.eps);
  w.f64(c.max_grad_norm);
  w.u8(c.schedule == LrSchedule::linear_to_zero ? 1 : 0);
  w.u64(c.total_steps);
  w.u64(a.step_count());
  w.vec(a.m1());
  w.vec(a.m2());
}

AdamState read_adam(Reader& r) {
  AdamConfig c;
  c.lr = r.f64();
  c.beta1 = r.f64();
  c.beta2 = r.f64();
  c.eps = r.f64();
  c.max_grad_norm = r.f64();
  c.schedule = r.u8() ? LrSchedule::linear_to_zero : LrSchedule::constant;
  c.total_steps = r.u64();
  const std::uint64_t step = r.u64();
  const Eigen::VectorXd m1 = r.vec();
  const Eigen::VectorXd m2 = r.vec();
  if (m1.size() != m2.size()) throw std::runtime_error("checkpoint: Adam moment size mismatch");
  AdamState a(c, m1.size());
  a.m1() = m1;
  a.m2() = m2;
  a.set_step_count(step);
  return a;
}

}  // namespace

void checkpoint_save(const std::string& path, const Checkpoint& ck) {
  Writer w(path);
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  write_layout(w, ck.theta.layout());

  w.str(ck.env_id);
  write_params(w, ck.theta);

  w.u8(static_cast<std::uint8_t>(ck.outer.cfg.strategy));
  w.f64(ck.outer.cfg.sigma);
  w.f64(ck.outer.cfg.mu);
  w.f64(ck.outer.cfg.alpha);
  w.u64(ck.outer.iteration);
  write_params(w, ck.outer.momentum);

  write_adam(w, ck.adam_actor);
  write_adam(w, ck.adam_critic);

  w.u64(ck.inner_rng_state);
  w.vec(ck.env_rng_states);
  w.vec(ck.action_rng_states);
  w.vec(ck.env_steps);
  w.u64(ck.env_states.size());
  for (const Eigen::VectorXd& s : ck.env_states) w.vec(s);
  w.vec(ck.tracker_returns);
  w.vec(ck.tracker_lengths);

  w.u64(ck.iterations_done);
  w.u64(ck.transitions_done);
  w.u64(ck.next_eval);

  w.u64(ck.eval_points.size());
  for (const EvalPoint& e : ck.eval_points) {
    w.u64(e.index);
    w.u64(e.transitions);
    w.f64(e.mean_return);
  }
  w.u64(ck.diagnostics.size());
  for (const IterationDiag& d : ck.diagnostics) {
    w.u64(d.iteration);
    w.u64(d.transitions);
    w.f64(d.outer_grad_norm);
    w.f64(d.momentum_effect_norm);
    w.f64(d.policy_loss);
    w.f64(d.value_loss);
    w.f64(d.clip_fraction);
    w.f64(d.mean_ratio);
    w.f64(d.active_fraction);
    w.f64(d.entropy);
  }
  w.f64(ck.best_mean);
  w.u64(ck.best_eval_index);
  write_params(w, ck.best_theta);
  w.finish();
}

Checkpoint checkpoint_load(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: '" + path + "' is not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  auto layout = read_layout(r);

  Checkpoint ck;
  ck.env_id = r.str();
  ck.theta = read_params(r, layout);

  const std::uint8_t strategy = r.u8();
  if (strategy > static_cast<std::uint8_t>(OuterStrategy::biased_init))
    throw std::runtime_error("checkpoint: unknown outer strategy tag");
  ck.outer.cfg.strategy = static_cast<OuterStrategy>(strategy);
  ck.outer.cfg.sigma = r.f64();
  ck.outer.cfg.mu = r.f64();
  ck.outer.cfg.alpha = r.f64();
  ck.outer.iteration = r.u64();
  ck.outer.momentum = read_params(r, layout);

  ck.adam_actor = read_adam(r);
  ck.adam_critic = read_adam(r);

  ck.inner_rng_state = r.u64();
  ck.env_rng_states = r.vec_u64();
  ck.action_rng_states = r.vec_u64();
  ck.env_steps = r.vec_u64();
  const std::uint64_t n_envs = r.u64();
  if (n_envs > (1u << 20)) throw std::runtime_error("checkpoint: implausible env count");
  ck.env_states.resize(n_envs);
  for (auto& s : ck.env_states) s = r.vec();
  ck.tracker_returns = r.vec();
  ck.tracker_lengths = r.vec();

  ck.iterations_done = r.u64();
  ck.transitions_done = r.u64();
  ck.next_eval = r.u64();

  const std::uint64_t n_evals = r.u64();
  if (n_evals > (1u << 24)) throw std::runtime_error("checkpoint: implausible eval count");
  ck.eval_points.resize(n_evals);
  for (EvalPoint& e : ck.eval_points) {
    e.index = r.u64();
    e.transitions = r.u64();
    e.mean_return = r.f64();
  }
  const std::uint64_t n_diag = r.u64();
  if (n_diag > (1u << 24)) throw std::runtime_error("checkpoint: implausible diagnostic count");
  ck.diagnostics.resize(n_diag);
  for (IterationDiag& d : ck.diagnostics) {
    d.iteration = r.u64();
    d.transitions = r.u64();
    d.outer_grad_norm = r.f64();
    d.momentum_effect_norm = r.f64();
    d.policy_loss = r.f64();
    d.value_loss = r.f64();
    d.clip_fraction = r.f64();
    d.mean_ratio = r.f64();
    d.active_fraction = r.f64();
    d.entropy = r.f64();
  }
  ck.best_mean = r.f64();
  ck.best_eval_index = r.u64();
  ck.best_theta = read_params(r, layout);
  return ck;
}

}  // namespace ppolab
