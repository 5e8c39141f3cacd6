#include "physbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "physbench/errors.hpp"

namespace physbench {

namespace {

void require_same_shape(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidInput("frame dimensions differ");
  }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double c = 0.5 * (size - 1);
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - c;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable "valid" filtering: output is (w - size + 1) x (h - size + 1).
std::vector<double> filter_valid(std::span<const double> img, int w, int h, const std::vector<double>& k) {
  const int size = static_cast<int>(k.size());
  const int ow = w - size + 1;
  const int oh = h - size + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < size; ++i) s += k[i] * img[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < size; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
  require_same_shape(a, b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double se = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    se += d * d;
  }
  if (se == 0.0) return kPsnrIdentical;
  const double mse = se / static_cast<double>(pa.size());
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Frame& a, const Frame& b, const SsimConfig& config) {
  require_same_shape(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < config.window || h < config.window) throw InvalidInput("frame smaller than the SSIM window");

  const auto pa = a.pixels();
  const auto pb = b.pixels();
  std::vector<double> aa(pa.size()), bb(pa.size()), ab(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    aa[i] = pa[i] * pa[i];
    bb[i] = pb[i] * pb[i];
    ab[i] = pa[i] * pb[i];
  }
  const auto k = gaussian_kernel(config.window, config.sigma);
  const auto mu_a = filter_valid(pa, w, h, k);
  const auto mu_b = filter_valid(pb, w, h, k);
  const auto e_aa = filter_valid(aa, w, h, k);
  const auto e_bb = filter_valid(bb, w, h, k);
  const auto e_ab = filter_valid(ab, w, h, k);

  const double c1 = (config.k1 * config.dynamic_range) * (config.k1 * config.dynamic_range);
  const double c2 = (config.k2 * config.dynamic_range) * (config.k2 * config.dynamic_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

double ssim_loss_from_ssim(double ssim_value) { return 1.0 - (1.0 + ssim_value) / 2.0; }

double ssim_loss(const Frame& a, const Frame& b, const SsimConfig& config) {
  return ssim_loss_from_ssim(ssim(a, b, config));
}

double l1(const Frame& a, const Frame& b) {
  require_same_shape(a, b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double s = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) s += std::abs(pa[i] - pb[i]);
  return s / static_cast<double>(pa.size());
}

double smooth_l1(double residual, double beta) {
  if (!(beta > 0.0)) throw InvalidInput("smooth_l1 beta must be positive");
  const double ax = std::abs(residual);
  return ax < beta ? 0.5 * ax * ax / beta : ax - 0.5 * beta;
}

double smooth_l1_grad(double residual, double beta) {
  if (std::abs(residual) < beta) return residual / beta;
  return residual > 0.0 ? 1.0 : -1.0;
}

double smooth_l1(std::span<const double> pred, std::span<const double> target, double beta) {
  if (!(beta > 0.0)) throw InvalidInput("smooth_l1 beta must be positive");
  if (pred.size() != target.size()) throw InvalidInput("smooth_l1 inputs differ in length");
  if (pred.empty()) throw InvalidInput("smooth_l1 needs at least one element");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += smooth_l1(pred[i] - target[i], beta);
  return s / static_cast<double>(pred.size());
}

double aggregate_psnr(std::span<const double> values) {
  double sum = 0.0;
  int n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += std::min(v, kPsnrAggregateCap);
    ++n;
  }
  return n == 0 ? kPsnrIdentical : sum / n;
}

MetricReport score_rollout(std::span<const Frame> pred, std::span<const Frame> truth) {
  if (pred.size() != truth.size()) throw InvalidInput("rollout lengths differ");
  if (pred.empty()) throw InvalidInput("rollout is empty");
  MetricReport r;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    r.psnr_per_frame.push_back(psnr(pred[i], truth[i]));
    r.ssim_per_frame.push_back(ssim(pred[i], truth[i]));
    r.l1_per_frame.push_back(l1(pred[i], truth[i]));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  r.psnr = aggregate_psnr(r.psnr_per_frame);
  r.ssim = mean(r.ssim_per_frame);
  r.l1 = mean(r.l1_per_frame);
  return r;
}

}  // namespace physbench
