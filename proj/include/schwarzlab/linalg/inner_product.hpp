#pragma once

#include <schwarzlab/linalg/factorization.hpp>

#include <memory>

namespace schwarzlab {

// (x, y)_W = y^H W x with W = I, M or M^{-1}; M real symmetric positive definite.
class WeightedInnerProduct {
 public:
  enum class Mode { euclidean, M, M_inverse };

  WeightedInnerProduct() = default;
  static WeightedInnerProduct euclidean(Index n);
  WeightedInnerProduct(SparseMatrix weight, Mode mode);

  Mode mode() const { return mode_; }
  Index size() const { return n_; }
  const SparseMatrix& weight() const { return weight_; }

  Vector apply_weight(std::span<const Scalar> x) const;
  Scalar inner(std::span<const Scalar> x, std::span<const Scalar> y) const;
  double norm(std::span<const Scalar> x) const;
  double norm_squared(std::span<const Scalar> x) const;

 private:
  Index n_ = 0;
  Mode mode_ = Mode::euclidean;
  SparseMatrix weight_;
  std::shared_ptr<const DenseFactorization> factor_;
};

std::string_view mode_name(WeightedInnerProduct::Mode mode);

}  // namespace schwarzlab
