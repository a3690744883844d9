#pragma once

#include "alone/operators.hpp"
#include "alone/patches.hpp"
#include "alone/tensor.hpp"

namespace alone {

/// H = A^H A + lambda * sum_j E_j^T E_j, the matrix of the quadratic x-update.
/// The patch term is the diagonal coverage-weight volume.
class NormalSystem {
 public:
  NormalSystem(const EncodingOperator& op, const PatchGeometry& geometry, double lambda);

  ComplexVolume apply(const ComplexVolume& x) const;
  ComplexVolume operator()(const ComplexVolume& x) const { return apply(x); }

  double lambda() const { return lambda_; }
  const RealVolume& coverage() const { return coverage_; }
  const EncodingOperator& op() const { return *op_; }

 private:
  const EncodingOperator* op_;
  double lambda_;
  RealVolume coverage_;
};

ComplexVolume apply_normal_system(const EncodingOperator& op, const PatchGeometry& geometry, double lambda,
                                  const ComplexVolume& x);

}  // namespace alone
