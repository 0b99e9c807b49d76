#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace ppolab {

// One named block of parameters inside a flat vector (a weight matrix, a bias
// vector, a log-std vector). offset/size index into the flat storage.
struct SegmentInfo {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
  int rows = 0;  // rows x cols for matrices; cols == 1 for vectors
  int cols = 1;
};

// Describes how a flat parameter vector decomposes into segments. Layouts are
// immutable once built and compared by value, so two networks constructed the
// same way are interchangeable.
class ParamLayout {
 public:
  ParamLayout() = default;

  // Appends a segment and returns its index.
  std::size_t add(const std::string& name, int rows, int cols = 1);

  std::size_t total_size() const { return total_; }
  const std::vector<SegmentInfo>& segments() const { return segments_; }
  const SegmentInfo& segment(const std::string& name) const;
  bool has(const std::string& name) const;

  bool operator==(const ParamLayout& other) const;
  bool operator!=(const ParamLayout& other) const { return !(*this == other); }

  // Compact human-readable form, e.g. "actor.w0[64x4] actor.b0[64] ...".
  std::string describe() const;

 private:
  std::vector<SegmentInfo> segments_;
  std::size_t total_ = 0;
};

// Flat vector of doubles plus a shared layout. All arithmetic between two
// ParamVectors requires identical layouts; mismatches throw with a message
// naming both layouts.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::shared_ptr<const ParamLayout> layout)
      : layout_(std::move(layout)),
        data_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout_->total_size()))) {}

  const ParamLayout& layout() const { return *layout_; }
  std::shared_ptr<const ParamLayout> layout_ptr() const { return layout_; }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }

  double* raw() { return data_.data(); }
  const double* raw() const { return data_.data(); }

  // Segment views as Eigen maps; matrix segments are row-major so that
  // row i of "actor.w0" holds the fan-in weights of output unit i.
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  matrix(const std::string& name);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  matrix(const std::string& name) const;
  Eigen::Map<Eigen::VectorXd> vector(const std::string& name);
  Eigen::Map<const Eigen::VectorXd> vector(const std::string& name) const;

  bool same_layout(const ParamVector& other) const;

  double norm() const { return data_.norm(); }
  bool all_finite() const { return data_.allFinite(); }

 private:
  std::shared_ptr<const ParamLayout> layout_;
  Eigen::VectorXd data_;
};

// y += a * x. Layout mismatch throws std::invalid_argument naming both layouts.
void param_axpy(double a, const ParamVector& x, ParamVector& y);

// Elementwise helpers with the same layout contract.
ParamVector param_add(const ParamVector& a, const ParamVector& b);
ParamVector param_sub(const ParamVector& a, const ParamVector& b);
void param_scale(double a, ParamVector& x);

void check_same_layout(const ParamVector& a, const ParamVector& b, const char* op);

}  // namespace ppolab
