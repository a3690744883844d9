#include "alone/tensor.hpp"

#include <cmath>
#include <string>

#include "alone/error.hpp"

namespace alone {

ComplexVolume::ComplexVolume(Dims dims, cx fill) : dims_(dims), data_(dims.size(), fill) {}

ComplexVolume::ComplexVolume(Dims dims, std::vector<cx> data) : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.size()) {
    throw DimensionError("volume data length " + std::to_string(data_.size()) + " does not match dims " +
                         std::to_string(dims_.size()));
  }
}

bool ComplexVolume::all_finite() const {
  for (const cx& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

ComplexVolume& ComplexVolume::operator+=(const ComplexVolume& o) {
  require_same_dims(dims_, o.dims_, "volume +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexVolume& ComplexVolume::operator-=(const ComplexVolume& o) {
  require_same_dims(dims_, o.dims_, "volume -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexVolume& ComplexVolume::operator*=(cx s) {
  for (cx& v : data_) v *= s;
  return *this;
}

ComplexVolume operator+(ComplexVolume a, const ComplexVolume& b) { return a += b; }
ComplexVolume operator-(ComplexVolume a, const ComplexVolume& b) { return a -= b; }
ComplexVolume operator*(cx s, ComplexVolume a) { return a *= s; }

cx inner_product(std::span<const cx> a, std::span<const cx> b) {
  if (a.size() != b.size()) {
    throw DimensionError("inner_product: length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  return {re, im};
}

double squared_norm(std::span<const cx> a) {
  double s = 0.0;
  for (const cx& v : a) s += v.real() * v.real() + v.imag() * v.imag();
  return s;
}

double norm(std::span<const cx> a) { return std::sqrt(squared_norm(a)); }

void axpy(cx alpha, std::span<const cx> x, std::span<cx> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

RealVolume magnitude(const ComplexVolume& v) {
  RealVolume m(v.dims());
  for (std::size_t i = 0; i < v.size(); ++i) m.data[i] = std::abs(v[i]);
  return m;
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dims (" + std::to_string(a.nx) + "," + std::to_string(a.ny) + "," +
                         std::to_string(a.nt) + ") vs (" + std::to_string(b.nx) + "," + std::to_string(b.ny) + "," +
                         std::to_string(b.nt) + ")");
  }
}

}  // namespace alone
