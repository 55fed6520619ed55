#pragma once

#include "vsrboost/image.hpp"

namespace vsrboost {

/// Returned by psnr() when the inputs are identical.
inline constexpr double kPsnrCap = 99.0;

/// 10*log10(255^2 / MSE) over every sample, capped at kPsnrCap.
double psnr(const ByteImage& a, const ByteImage& b);

struct SsimOptions {
  int window = 8;
  int step = 4;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean single-scale SSIM over uniform 8x8 windows on BT.601 luma.
///
/// Windows start every `step` pixels and always lie inside the image. The
/// value can go below zero for anti-correlated inputs.
double ssim(const ByteImage& a, const ByteImage& b, const SsimOptions& options = {});

}  // namespace vsrboost
