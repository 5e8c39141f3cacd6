#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "physbench/errors.hpp"

namespace physbench {

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// SplitMix64 generator state. Immutable: advancing returns a new value.
struct Rng64 {
  std::uint64_t state = 0;

  constexpr bool operator==(const Rng64&) const = default;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// The SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Advances the generator once and returns (next state, output).
constexpr std::pair<Rng64, std::uint64_t> rng_next(Rng64 rng) {
  const std::uint64_t s = rng.state + kGoldenGamma;
  return {Rng64{s}, mix64(s)};
}

/// Independent sub-stream for (seed, index). Used for per-video seeds and retry seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index * kGoldenGamma + kGoldenGamma));
}

/// Top 53 bits scaled into [0, 1). Bit-exact on every IEEE-754 platform.
constexpr double to_unit_interval(std::uint64_t value) {
  return static_cast<double>(value >> 11) * 0x1.0p-53;
}

/// Mutable convenience wrapper over Rng64 for samplers.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_{seed} {}

  std::uint64_t next_u64() {
    auto [next, out] = rng_next(rng_);
    rng_ = next;
    return out;
  }
  double uniform() { return to_unit_interval(next_u64()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). Uses the floating draw so the mapping is language-neutral.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
  Rng64 state() const { return rng_; }

 private:
  Rng64 rng_;
};

// ---------------------------------------------------------------------------
// ODE integration
// ---------------------------------------------------------------------------

template <std::size_t N>
using OdeState = std::array<double, N>;

namespace detail {

template <std::size_t N>
OdeState<N> axpy(const OdeState<N>& y, double h, const OdeState<N>& k) {
  OdeState<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

template <std::size_t N>
void require_finite(const OdeState<N>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericFailure(what);
  }
}

inline void require_step(double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidInput("integration step must be finite and >= 0");
}

}  // namespace detail

/// y + dt * f(y).
template <std::size_t N, class Deriv>
OdeState<N> euler_step(const OdeState<N>& y, Deriv&& deriv, double dt) {
  detail::require_step(dt);
  const OdeState<N> k = deriv(y);
  detail::require_finite(k, "non-finite derivative in euler_step");
  return detail::axpy(y, dt, k);
}

/// Classical fourth-order Runge-Kutta step for an autonomous system.
template <std::size_t N, class Deriv>
OdeState<N> rk4_step(const OdeState<N>& y, Deriv&& deriv, double dt) {
  detail::require_step(dt);
  const OdeState<N> k1 = deriv(y);
  detail::require_finite(k1, "non-finite k1 in rk4_step");
  const OdeState<N> k2 = deriv(detail::axpy(y, 0.5 * dt, k1));
  detail::require_finite(k2, "non-finite k2 in rk4_step");
  const OdeState<N> k3 = deriv(detail::axpy(y, 0.5 * dt, k2));
  detail::require_finite(k3, "non-finite k3 in rk4_step");
  const OdeState<N> k4 = deriv(detail::axpy(y, dt, k3));
  detail::require_finite(k4, "non-finite k4 in rk4_step");
  OdeState<N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  detail::require_finite(out, "non-finite state after rk4_step");
  return out;
}

/// `substeps` equal RK4 steps covering `dt`.
template <std::size_t N, class Deriv>
OdeState<N> rk4_advance(OdeState<N> y, Deriv&& deriv, double dt, int substeps) {
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) y = rk4_step(y, deriv, h);
  return y;
}

}  // namespace physbench
