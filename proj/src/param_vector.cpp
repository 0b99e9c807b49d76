#include "ppolab/param_vector.hpp"

#include <sstream>
#include <stdexcept>

namespace ppolab {

std::size_t ParamLayout::add(const std::string& name, int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("segment dims must be positive: " + name);
  if (has(name)) throw std::invalid_argument("duplicate segment name: " + name);
  SegmentInfo s;
  s.name = name;
  s.offset = total_;
  s.rows = rows;
  s.cols = cols;
  s.size = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  total_ += s.size;
  segments_.push_back(std::move(s));
  return segments_.size() - 1;
}

const SegmentInfo& ParamLayout::segment(const std::string& name) const {
  for (const auto& s : segments_)
    if (s.name == name) return s;
  throw std::out_of_range("no segment named '" + name + "' in layout " + describe());
}

bool ParamLayout::has(const std::string& name) const {
  for (const auto& s : segments_)
    if (s.name == name) return true;
  return false;
}

bool ParamLayout::operator==(const ParamLayout& other) const {
  if (total_ != other.total_ || segments_.size() != other.segments_.size()) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& a = segments_[i];
    const auto& b = other.segments_[i];
    if (a.name != b.name || a.offset != b.offset || a.rows != b.rows || a.cols != b.cols)
      return false;
  }
  return true;
}

std::string ParamLayout::describe() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (i) os << " ";
    os << s.name << "[" << s.rows;
    if (s.cols != 1) os << "x" << s.cols;
    os << "]";
  }
  os << "}";
  return os.str();
}

using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<RowMajorMat> ParamVector::matrix(const std::string& name) {
  const auto& s = layout_->segment(name);
  return {data_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<const RowMajorMat> ParamVector::matrix(const std::string& name) const {
  const auto& s = layout_->segment(name);
  return {data_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<Eigen::VectorXd> ParamVector::vector(const std::string& name) {
  const auto& s = layout_->segment(name);
  return {data_.data() + s.offset, static_cast<Eigen::Index>(s.size)};
}

Eigen::Map<const Eigen::VectorXd> ParamVector::vector(const std::string& name) const {
  const auto& s = layout_->segment(name);
  return {data_.data() + s.offset, static_cast<Eigen::Index>(s.size)};
}

bool ParamVector::same_layout(const ParamVector& other) const {
  if (layout_ == other.layout_) return true;
  if (!layout_ || !other.layout_) return false;
  return *layout_ == *other.layout_;
}

void check_same_layout(const ParamVector& a, const ParamVector& b, const char* op) {
  if (!a.same_layout(b)) {
    throw std::invalid_argument(std::string(op) + ": layout mismatch between " +
                                (a.layout_ptr() ? a.layout().describe() : "<null>") + " and " +
                                (b.layout_ptr() ? b.layout().describe() : "<null>"));
  }
}

void param_axpy(double a, const ParamVector& x, ParamVector& y) {
  check_same_layout(x, y, "param_axpy");
  // a == 0 must leave y bitwise unchanged; going through IEEE arithmetic
  // would turn a -0.0 entry of y into +0.0 (y + 0.0*x rounds -0 + +0 to +0).
  if (a == 0.0) return;
  y.data() += a * x.data();
}

ParamVector param_add(const ParamVector& a, const ParamVector& b) {
  check_same_layout(a, b, "param_add");
  ParamVector out = a;
  out.data() += b.data();
  return out;
}

ParamVector param_sub(const ParamVector& a, const ParamVector& b) {
  check_same_layout(a, b, "param_sub");
  ParamVector out = a;
  out.data() -= b.data();
  return out;
}

void param_scale(double a, ParamVector& x) { x.data() *= a; }

}  // namespace ppolab
