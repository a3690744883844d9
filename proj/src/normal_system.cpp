#include "alone/normal_system.hpp"

#include "alone/error.hpp"

namespace alone {

NormalSystem::NormalSystem(const EncodingOperator& op, const PatchGeometry& geometry, double lambda)
    : op_(&op), lambda_(lambda), coverage_(coverage_weights(geometry)) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  require_same_dims(op.image_dims(), geometry.image(), "NormalSystem");
}

ComplexVolume NormalSystem::apply(const ComplexVolume& x) const {
  require_same_dims(op_->image_dims(), x.dims(), "NormalSystem::apply");
  ComplexVolume out = op_->normal(x);
  if (lambda_ != 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += lambda_ * coverage_.data[i] * x[i];
  }
  return out;
}

ComplexVolume apply_normal_system(const EncodingOperator& op, const PatchGeometry& geometry, double lambda,
                                  const ComplexVolume& x) {
  return NormalSystem(op, geometry, lambda).apply(x);
}

}  // namespace alone
