#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "physbench/clip.hpp"
#include "physbench/metrics.hpp"
#include "physbench/scenarios.hpp"

namespace physbench {

enum class BaselineKind { optimal_constant, image_linear };
std::string_view to_string(BaselineKind kind);

struct BaselineResult {
  BaselineKind kind = BaselineKind::optimal_constant;
  TaskId task = TaskId::gravity_2d;
  double loss = 0.0;      // held-out loss for image_linear; loss on the given labels otherwise
  double constant = 0.0;  // optimal_constant only
  std::vector<double> weights;  // image_linear only, one per flattened input pixel
  double bias = 0.0;
  double train_loss = 0.0;
  std::vector<double> loss_history;  // training loss after each accepted epoch
};

struct NormalizedLabels {
  std::vector<double> scaled;
  double scale = 1.0;
};

double population_std(std::span<const double> values);

/// Divides by the population standard deviation; no centering.
NormalizedLabels normalize_labels(std::span<const double> raw);

/// Mean smooth-L1 of predicting `c` for every label.
double constant_objective(std::span<const double> labels, double c, double beta);

/// Ternary search for the best constant over [min, max] of the labels.
BaselineResult optimal_constant(std::span<const double> labels, double beta = kProbeBeta);

struct LinearFitConfig {
  double beta = kProbeBeta;
  double step_size = 1e-3;  // initial step; adapted by backtracking
  int max_epochs = 2000;
  double tolerance = 1e-6;  // relative loss improvement that ends training
  double holdout_fraction = 0.1;
};

/// Flattened pixels of each sample, row per sample, plus the source video of each row.
struct FeatureSet {
  std::vector<std::vector<float>> rows;
  std::vector<int> videos;
};

FeatureSet flatten_clips(std::span<const Clip> clips);

/// Affine map from flattened input frames to a scalar, trained by full-batch gradient
/// descent on mean smooth-L1. The last `holdout_fraction` of videos (by index) are
/// held out and `loss` is measured on them.
BaselineResult fit_image_linear(std::span<const Clip> clips, std::span<const double> labels,
                                const LinearFitConfig& config = {});
BaselineResult fit_image_linear(const FeatureSet& features, std::span<const double> labels,
                                const LinearFitConfig& config = {});

/// Indices of the training and held-out rows for a list of per-row video ids.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> holdout;
};
Split split_by_video(std::span<const int> videos, double holdout_fraction);

}  // namespace physbench
