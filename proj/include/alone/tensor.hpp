#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace alone {

using cx = std::complex<double>;

/// Extent of a dynamic image: two spatial axes and time.
struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nt = 0;

  std::size_t frame_size() const { return nx * ny; }
  std::size_t size() const { return nx * ny * nt; }
  // x fastest, then y, then t.
  std::size_t index(std::size_t x, std::size_t y, std::size_t t) const { return x + nx * (y + ny * t); }

  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense complex image x in C^(Nx*Ny*Nt), stored with x fastest, then y, then t.
class ComplexVolume {
 public:
  ComplexVolume() = default;
  explicit ComplexVolume(Dims dims, cx fill = {});
  ComplexVolume(Dims dims, std::vector<cx> data);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  cx& operator[](std::size_t i) { return data_[i]; }
  const cx& operator[](std::size_t i) const { return data_[i]; }
  cx& operator()(std::size_t x, std::size_t y, std::size_t t) { return data_[dims_.index(x, y, t)]; }
  const cx& operator()(std::size_t x, std::size_t y, std::size_t t) const { return data_[dims_.index(x, y, t)]; }

  std::span<cx> data() { return data_; }
  std::span<const cx> data() const { return data_; }
  std::span<cx> frame(std::size_t t) { return {data_.data() + t * dims_.frame_size(), dims_.frame_size()}; }
  std::span<const cx> frame(std::size_t t) const {
    return {data_.data() + t * dims_.frame_size(), dims_.frame_size()};
  }

  bool all_finite() const;

  ComplexVolume& operator+=(const ComplexVolume& o);
  ComplexVolume& operator-=(const ComplexVolume& o);
  ComplexVolume& operator*=(cx s);

  friend bool operator==(const ComplexVolume&, const ComplexVolume&) = default;

 private:
  Dims dims_{};
  std::vector<cx> data_;
};

ComplexVolume operator+(ComplexVolume a, const ComplexVolume& b);
ComplexVolume operator-(ComplexVolume a, const ComplexVolume& b);
ComplexVolume operator*(cx s, ComplexVolume a);

/// Real-valued companion of ComplexVolume (coverage weights, magnitudes).
struct RealVolume {
  Dims dims{};
  std::vector<double> data;

  RealVolume() = default;
  explicit RealVolume(Dims d, double fill = 0.0) : dims(d), data(d.size(), fill) {}
  double& operator()(std::size_t x, std::size_t y, std::size_t t) { return data[dims.index(x, y, t)]; }
  double operator()(std::size_t x, std::size_t y, std::size_t t) const { return data[dims.index(x, y, t)]; }
};

/// Sum_i a_i * conj(b_i). Throws DimensionError on length mismatch.
cx inner_product(std::span<const cx> a, std::span<const cx> b);
inline cx inner_product(const ComplexVolume& a, const ComplexVolume& b) { return inner_product(a.data(), b.data()); }

double squared_norm(std::span<const cx> a);
double norm(std::span<const cx> a);
inline double norm(const ComplexVolume& a) { return norm(a.data()); }

/// y <- y + alpha * x
void axpy(cx alpha, std::span<const cx> x, std::span<cx> y);

RealVolume magnitude(const ComplexVolume& v);

void require_same_dims(const Dims& a, const Dims& b, const char* what);

}  // namespace alone
