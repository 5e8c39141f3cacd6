#pragma once

#include <limits>
#include <span>
#include <vector>

#include "physbench/render.hpp"

namespace physbench {

/// Reported by psnr() for identical frames.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();
/// Per-frame PSNR values are capped here before averaging.
inline constexpr double kPsnrAggregateCap = 100.0;

/// Smooth-L1 transition point used by every probing task.
inline constexpr double kProbeBeta = 0.01;

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

struct MetricReport {
  double psnr = 0.0;  // mean over frames; kPsnrIdentical when every frame matched exactly
  double ssim = 0.0;
  double l1 = 0.0;
  std::vector<double> psnr_per_frame;
  std::vector<double> ssim_per_frame;
  std::vector<double> l1_per_frame;
};

/// 10 log10(1 / MSE) with peak 1.
double psnr(const Frame& a, const Frame& b);
/// Mean local SSIM over Gaussian windows fully inside the image.
double ssim(const Frame& a, const Frame& b, const SsimConfig& config = {});
/// 1 - (1 + SSIM) / 2, in [0, 1].
double ssim_loss(const Frame& a, const Frame& b, const SsimConfig& config = {});
double ssim_loss_from_ssim(double ssim_value);
double l1(const Frame& a, const Frame& b);

/// Huber-style loss, quadratic below beta: 0.5 x^2 / beta, else |x| - 0.5 beta.
double smooth_l1(double residual, double beta);
/// Mean smooth-L1 over paired elements.
double smooth_l1(std::span<const double> pred, std::span<const double> target, double beta);
/// d/dx of the elementwise loss.
double smooth_l1_grad(double residual, double beta);

/// Per-frame PSNR/SSIM/L1 plus their means.
MetricReport score_rollout(std::span<const Frame> pred, std::span<const Frame> truth);

/// Mean of finite PSNR values after capping; kPsnrIdentical if none are finite.
double aggregate_psnr(std::span<const double> values);

}  // namespace physbench
