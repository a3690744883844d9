#pragma once

#include <limits>
#include <vector>

#include "alone/tensor.hpp"

namespace alone {

/// PSNR of identical inputs is +infinity; CSV files store this value instead.
inline constexpr double kPsnrSentinel = 999.0;

struct MetricsRecord {
  double psnr = 0.0;
  double ssim = 0.0;
  double nrmse = 0.0;
  double crop_fraction = 0.5;
};

/// Central round(fraction * N) voxels along x and y, all frames kept.
ComplexVolume crop_center(const ComplexVolume& v, double fraction = 0.5);
RealVolume crop_center(const RealVolume& v, double fraction = 0.5);

// All metrics compare magnitude images over the central crop.

/// || |x| - |ref| ||_2 / || |ref| ||_2; throws PreconditionError for a zero reference.
double nrmse(const ComplexVolume& x, const ComplexVolume& ref, double crop = 0.5);
/// 20 log10(max|ref| / rmse); +infinity when rmse is 0.
double psnr(const ComplexVolume& x, const ComplexVolume& ref, double crop = 0.5);
/// Frame-wise 2D SSIM averaged over frames, dynamic range max|ref|.
double ssim(const ComplexVolume& x, const ComplexVolume& ref, double crop = 0.5);

/// SSIM between two real volumes with an externally fixed dynamic range.
/// Gaussian window 11x11, sigma 1.5, evaluated on the valid region; frames
/// smaller than 11 pixels use the largest odd window that fits.
double ssim(const RealVolume& a, const RealVolume& b, double dynamic_range);

MetricsRecord evaluate(const ComplexVolume& x, const ComplexVolume& ref, double crop = 0.5);
/// One record per frame.
std::vector<MetricsRecord> evaluate_frames(const ComplexVolume& x, const ComplexVolume& ref, double crop = 0.5);

}  // namespace alone
