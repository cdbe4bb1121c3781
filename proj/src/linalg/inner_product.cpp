#include <schwarzlab/linalg/inner_product.hpp>

#include <schwarzlab/linalg/kernels.hpp>

#include <cmath>

namespace schwarzlab {

WeightedInnerProduct WeightedInnerProduct::euclidean(Index n) {
  WeightedInnerProduct ip;
  ip.n_ = n;
  ip.mode_ = Mode::euclidean;
  return ip;
}

WeightedInnerProduct::WeightedInnerProduct(SparseMatrix weight, Mode mode)
    : n_(weight.rows()), mode_(mode), weight_(std::move(weight)) {
  if (weight_.rows() != weight_.cols()) throw DimensionError("inner product weight must be square");
  if (mode_ == Mode::M_inverse && n_ > 0) {
    factor_ = std::make_shared<const DenseFactorization>(factorize(weight_));
  }
}

Vector WeightedInnerProduct::apply_weight(std::span<const Scalar> x) const {
  if (x.size() != n_) throw DimensionError("inner product: vector has the wrong length");
  switch (mode_) {
    case Mode::euclidean:
      return Vector(x.begin(), x.end());
    case Mode::M:
      return weight_.apply(x);
    case Mode::M_inverse:
      return n_ == 0 ? Vector{} : factor_->solve(x);
  }
  return {};
}

Scalar WeightedInnerProduct::inner(std::span<const Scalar> x, std::span<const Scalar> y) const {
  const Vector wx = apply_weight(x);
  return kernels::dotc(y.data(), wx.data(), n_);
}

double WeightedInnerProduct::norm_squared(std::span<const Scalar> x) const { return inner(x, x).real(); }

double WeightedInnerProduct::norm(std::span<const Scalar> x) const {
  return std::sqrt(std::max(0.0, norm_squared(x)));
}

std::string_view mode_name(WeightedInnerProduct::Mode mode) {
  switch (mode) {
    case WeightedInnerProduct::Mode::euclidean:
      return "euclidean";
    case WeightedInnerProduct::Mode::M:
      return "M";
    case WeightedInnerProduct::Mode::M_inverse:
      return "M_inverse";
  }
  return "?";
}

}  // namespace schwarzlab
