#include "physbench/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "physbench/errors.hpp"

namespace physbench {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::optimal_constant: return "optimal_constant";
    case BaselineKind::image_linear: return "image_linear";
  }
  return "unknown";
}

double population_std(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("population_std of an empty set");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

NormalizedLabels normalize_labels(std::span<const double> raw) {
  if (raw.size() < 2) throw DegenerateLabels("need at least two labels to normalize");
  const double sd = population_std(raw);
  if (!(sd > 0.0)) throw DegenerateLabels("labels have zero variance");
  NormalizedLabels out;
  out.scale = sd;
  out.scaled.reserve(raw.size());
  for (double v : raw) out.scaled.push_back(v / sd);
  return out;
}

double constant_objective(std::span<const double> labels, double c, double beta) {
  double total = 0.0;
  for (double y : labels) total += smooth_l1(c - y, beta);
  return total / static_cast<double>(labels.size());
}

BaselineResult optimal_constant(std::span<const double> labels, double beta) {
  if (labels.empty()) throw InvalidInput("optimal_constant needs at least one label");
  if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
  auto [lo_it, hi_it] = std::minmax_element(labels.begin(), labels.end());
  double lo = *lo_it;
  double hi = *hi_it;
  // Each round keeps 2/3 of the interval; the cap only matters when rounding stalls it.
  for (int round = 0; round < 400 && hi - lo > 1e-9; ++round) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double f1 = constant_objective(labels, m1, beta);
    const double f2 = constant_objective(labels, m2, beta);
    // On a tie convexity puts a minimizer in [m1, m2]; keeping both ends centers flat optima.
    if (f1 == f2) {
      lo = m1;
      hi = m2;
    } else if (f1 < f2) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  BaselineResult r;
  r.kind = BaselineKind::optimal_constant;
  r.constant = 0.5 * (lo + hi);
  r.loss = constant_objective(labels, r.constant, beta);
  r.train_loss = r.loss;
  return r;
}

FeatureSet flatten_clips(std::span<const Clip> clips) {
  if (clips.empty()) throw InvalidInput("no clips to flatten");
  const std::size_t m = clips.front().inputs.size();
  if (m == 0) throw InvalidInput("clip has no input frames");
  const std::size_t frame_size = clips.front().inputs.front().size();
  FeatureSet out;
  out.rows.reserve(clips.size());
  for (const auto& c : clips) {
    if (c.inputs.size() != m) throw InvalidInput("clips disagree on input frame count");
    std::vector<float> row;
    row.reserve(m * frame_size);
    for (const auto& f : c.inputs) {
      if (f.size() != frame_size) throw InvalidInput("clips disagree on frame size");
      for (double p : f.pixels()) row.push_back(static_cast<float>(p));
    }
    out.rows.push_back(std::move(row));
    out.videos.push_back(c.video);
  }
  return out;
}

Split split_by_video(std::span<const int> videos, double holdout_fraction) {
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0) throw InvalidInput("holdout_fraction must be in [0, 1)");
  const std::set<int> ids(videos.begin(), videos.end());
  const std::vector<int> sorted(ids.begin(), ids.end());
  std::size_t held = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(sorted.size())));
  if (holdout_fraction > 0.0 && sorted.size() >= 2) held = std::max<std::size_t>(held, 1);
  held = std::min(held, sorted.size() - 1);
  const int first_held = held == 0 ? sorted.back() + 1 : sorted[sorted.size() - held];
  Split s;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    (videos[i] >= first_held ? s.holdout : s.train).push_back(i);
  }
  return s;
}

namespace {

using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

MatrixF gather(const FeatureSet& f, const std::vector<std::size_t>& rows, std::size_t dim) {
  MatrixF x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXf>(f.rows[rows[r]].data(), x.cols());
  }
  return x;
}

double mean_loss(const MatrixF& x, const Eigen::VectorXd& y, const Eigen::VectorXf& w, double b, double beta,
                 Eigen::VectorXd* residual) {
  const Eigen::VectorXd pred = (x * w).cast<double>().array() + b;
  Eigen::VectorXd r = pred - y;
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) total += smooth_l1(r[i], beta);
  if (residual) *residual = std::move(r);
  return total / static_cast<double>(y.size());
}

}  // namespace

BaselineResult fit_image_linear(const FeatureSet& features, std::span<const double> labels,
                                const LinearFitConfig& config) {
  if (features.rows.empty()) throw InvalidInput("fit_image_linear needs at least one sample");
  if (features.rows.size() != labels.size() || features.videos.size() != labels.size()) {
    throw InvalidInput("feature rows and labels differ in count");
  }
  const std::size_t dim = features.rows.front().size();
  for (const auto& row : features.rows) {
    if (row.size() != dim) throw InvalidInput("feature rows differ in length");
  }
  if (!(config.beta > 0.0) || !(config.step_size > 0.0)) throw InvalidInput("beta and step_size must be positive");

  const Split split = split_by_video(features.videos, config.holdout_fraction);
  const MatrixF x = gather(features, split.train, dim);
  Eigen::VectorXd y(static_cast<Eigen::Index>(split.train.size()));
  for (std::size_t i = 0; i < split.train.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[split.train[i]];

  Eigen::VectorXf w = Eigen::VectorXf::Zero(static_cast<Eigen::Index>(dim));
  double b = 0.0;
  double step = config.step_size;
  Eigen::VectorXd residual;
  double loss = mean_loss(x, y, w, b, config.beta, &residual);

  BaselineResult result;
  result.kind = BaselineKind::image_linear;
  const double n = static_cast<double>(y.size());

  for (int epoch = 0; epoch < config.max_epochs && loss > 0.0; ++epoch) {
    Eigen::VectorXd g(residual.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = smooth_l1_grad(residual[i], config.beta) / n;
    const Eigen::VectorXf gw = x.transpose() * g.cast<float>();
    const double gb = g.sum();
    if (gw.squaredNorm() == 0.0f && gb == 0.0) break;

    // Backtracking: halve the step until the loss drops, then let it grow again.
    bool accepted = false;
    double new_loss = loss;
    Eigen::VectorXd new_residual;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const Eigen::VectorXf w_try = w - static_cast<float>(step) * gw;
      const double b_try = b - step * gb;
      new_loss = mean_loss(x, y, w_try, b_try, config.beta, &new_residual);
      if (new_loss < loss) {
        w = w_try;
        b = b_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double improvement = (loss - new_loss) / loss;
    loss = new_loss;
    residual = std::move(new_residual);
    result.loss_history.push_back(loss);
    step *= 2.0;
    if (improvement < config.tolerance) break;
  }

  result.weights.assign(w.data(), w.data() + w.size());
  result.bias = b;
  result.train_loss = loss;
  if (split.holdout.empty()) {
    result.loss = loss;
  } else {
    const MatrixF xh = gather(features, split.holdout, dim);
    Eigen::VectorXd yh(static_cast<Eigen::Index>(split.holdout.size()));
    for (std::size_t i = 0; i < split.holdout.size(); ++i) yh[static_cast<Eigen::Index>(i)] = labels[split.holdout[i]];
    result.loss = mean_loss(xh, yh, w, b, config.beta, nullptr);
  }
  return result;
}

BaselineResult fit_image_linear(std::span<const Clip> clips, std::span<const double> labels,
                                const LinearFitConfig& config) {
  if (clips.empty()) throw InvalidInput("fit_image_linear needs at least one clip");
  return fit_image_linear(flatten_clips(clips), labels, config);
}

}  // namespace physbench
