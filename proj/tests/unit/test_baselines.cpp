#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "physbench/baselines.hpp"
#include "physbench/generate.hpp"
#include "physbench/numerics.hpp"

using namespace physbench;

namespace {

double independent_std(const std::vector<double>& v) {
  long double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  long double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / v.size()));
}

double objective(const std::vector<double>& labels, double c) {
  double s = 0.0;
  for (double y : labels) {
    const double x = std::abs(c - y);
    s += x < 0.01 ? 0.5 * x * x / 0.01 : x - 0.005;
  }
  return s / labels.size();
}

std::vector<Clip> bounce_clips(int n, int m) {
  std::vector<Clip> clips;
  for (int i = 0; i < n; ++i) {
    const GeneratedVideo v = generate_video(DatasetId::bounce2d, 55, i, n);
    Clip c;
    c.inputs.assign(v.frames.begin(), v.frames.begin() + m);
    c.target = v.frames[m];
    c.video = i;
    clips.push_back(c);
  }
  return clips;
}

double mean_intensity(const Clip& c) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& f : c.inputs) {
    for (double p : f.pixels()) s += p;
    n += f.size();
  }
  return s / n;
}

}  // namespace

TEST_CASE("normalize_labels examples") {
  const auto a = normalize_labels(std::vector<double>{0.0, 2.0});
  CHECK(a.scale == 1.0);
  CHECK(a.scaled == std::vector<double>{0.0, 2.0});

  const auto g = normalize_labels(std::vector<double>{-3e-4, -2e-4, -1e-4, 0.0, 1e-4, 2e-4, 3e-4});
  CHECK(g.scale == doctest::Approx(2e-4).epsilon(1e-12));
  const double expected[] = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
  for (int i = 0; i < 7; ++i) CHECK(g.scaled[i] == doctest::Approx(expected[i]).epsilon(1e-12));

  CHECK_THROWS_AS(normalize_labels(std::vector<double>{5.0, 5.0, 5.0}), DegenerateLabels);
  CHECK_THROWS_AS(normalize_labels(std::vector<double>{5.0}), DegenerateLabels);
}

TEST_CASE("normalize_labels is scale-equivariant with unit std") {
  Sampler s(10);
  std::vector<double> raw;
  for (int i = 0; i < 200; ++i) raw.push_back(s.uniform(-3.0, 7.0));
  const auto base = normalize_labels(raw);
  CHECK(std::abs(independent_std(base.scaled) - 1.0) <= 1e-9);
  for (double k : {1e-4, 0.5, 3.0, 1e6}) {
    std::vector<double> scaled_raw;
    for (double v : raw) scaled_raw.push_back(k * v);
    const auto n = normalize_labels(scaled_raw);
    CHECK(n.scale == doctest::Approx(k * base.scale).epsilon(1e-12));
    for (std::size_t i = 0; i < raw.size(); ++i) CHECK(n.scaled[i] == doctest::Approx(base.scaled[i]).epsilon(1e-12));
  }
}

TEST_CASE("optimal_constant agrees with a dense grid search") {
  const std::vector<double> labels{-1.0, 0.0, 1.0};
  double best_c = 0.0, best = INFINITY;
  for (int i = -200000; i <= 200000; ++i) {
    const double c = i * 1e-5;
    const double v = objective(labels, c);
    if (v < best) best = v, best_c = c;
  }
  const BaselineResult r = optimal_constant(labels, 0.01);
  CHECK(r.kind == BaselineKind::optimal_constant);
  CHECK(std::abs(r.constant - best_c) <= 1e-5);
  CHECK(r.loss <= best + 1e-12);
  CHECK(r.loss == doctest::Approx(0.995 * 2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("optimal_constant degenerate and symmetric cases") {
  const BaselineResult same = optimal_constant(std::vector<double>{5.0, 5.0, 5.0}, 0.01);
  CHECK(same.constant == 5.0);
  CHECK(same.loss == 0.0);
  for (double a : {0.003, 0.5, 2.0, 40.0}) {
    const BaselineResult r = optimal_constant(std::vector<double>{-a, a}, 0.01);
    CHECK(std::abs(r.constant) <= 1e-9);
  }
  CHECK_THROWS_AS(optimal_constant(std::vector<double>{}, 0.01), InvalidInput);
  CHECK_THROWS_AS(optimal_constant(std::vector<double>{1.0}, 0.0), InvalidInput);
}

TEST_CASE("optimal_constant beats random constants and the objective is convex") {
  Sampler s(11);
  for (TaskId task : kAllTasks) {
    const auto grid = label_grid(task);
    std::vector<double> raw;
    for (int i = 0; i < 300; ++i) raw.push_back(grid[s.index(grid.size())]);
    if (task == TaskId::bounces_2d || task == TaskId::bounces_3d) {
      for (double& v : raw) v = std::floor(std::pow(s.uniform(), 2.0) * 30.0);  // skewed counts
    }
    const auto labels = normalize_labels(raw).scaled;
    const BaselineResult r = optimal_constant(labels, kProbeBeta);
    const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    for (int i = 0; i < 1000; ++i) {
      const double c = s.uniform(*lo - 1.0, *hi + 1.0);
      CHECK(r.loss <= objective(labels, c) + 1e-12);
      const double c2 = s.uniform(*lo - 1.0, *hi + 1.0);
      CHECK(constant_objective(labels, 0.5 * (c + c2), kProbeBeta) <=
            0.5 * (constant_objective(labels, c, kProbeBeta) + constant_objective(labels, c2, kProbeBeta)) + 1e-12);
    }
  }
}

TEST_CASE("split_by_video holds out the last tenth of videos") {
  std::vector<int> videos;
  for (int v = 0; v < 100; ++v) {
    videos.push_back(v);
    videos.push_back(v);
  }
  const Split s = split_by_video(videos, 0.1);
  CHECK(s.train.size() == 180);
  CHECK(s.holdout.size() == 20);
  for (std::size_t i : s.holdout) CHECK(videos[i] >= 90);
  CHECK(split_by_video(std::vector<int>{0, 1}, 0.1).holdout.size() == 1);
  CHECK(split_by_video(std::vector<int>{3}, 0.1).holdout.empty());
  CHECK(split_by_video(std::vector<int>{0, 1, 2}, 0.0).holdout.empty());
}

TEST_CASE("image_linear fits zero labels exactly") {
  const auto clips = bounce_clips(20, 5);
  const std::vector<double> zeros(clips.size(), 0.0);
  const BaselineResult r = fit_image_linear(clips, zeros);
  CHECK(r.kind == BaselineKind::image_linear);
  CHECK(r.loss < 1e-6);
  CHECK(r.train_loss < 1e-6);
  CHECK(r.weights.size() == 5u * 64 * 64);
}

TEST_CASE("image_linear recovers mean intensity") {
  const auto clips = bounce_clips(100, 5);
  std::vector<double> labels;
  for (const auto& c : clips) labels.push_back(mean_intensity(c));
  CHECK(independent_std(labels) > 0.1);
  const BaselineResult r = fit_image_linear(clips, labels);
  CHECK(r.loss < 1e-3);

  const Split split = split_by_video(flatten_clips(clips).videos, 0.1);
  double zero_loss = 0.0;
  for (std::size_t i : split.train) zero_loss += smooth_l1(labels[i], kProbeBeta);
  zero_loss /= split.train.size();
  CHECK(r.train_loss <= zero_loss);

  REQUIRE(!r.loss_history.empty());
  CHECK(r.loss_history.front() <= zero_loss);
  for (std::size_t i = 1; i < r.loss_history.size(); ++i) CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
  CHECK(r.loss_history.back() == r.train_loss);
}

TEST_CASE("image_linear rejects bad input") {
  CHECK_THROWS_AS(fit_image_linear(std::vector<Clip>{}, std::vector<double>{}), InvalidInput);
  const auto clips = bounce_clips(3, 2);
  CHECK_THROWS_AS(fit_image_linear(clips, std::vector<double>{1.0, 2.0}), InvalidInput);
  auto uneven = clips;
  uneven[1].inputs.pop_back();
  CHECK_THROWS_AS(fit_image_linear(uneven, std::vector<double>{1.0, 2.0, 3.0}), InvalidInput);
}
