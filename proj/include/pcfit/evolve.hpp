#pragma once

#include <algorithm>
#include <chrono>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcfit/error.hpp"
#include "pcfit/geometry.hpp"
#include "pcfit/random.hpp"
#include "pcfit/scoring.hpp"

namespace pcfit {

/// Closed real interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return std::clamp(v, lo, hi); }
  double width() const { return hi - lo; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr std::size_t kGeneCount = 5;

/// Gene i of a chromosome, in the order (theta, x_c, y_c, a, b).
inline double& gene(EllipseParams& p, std::size_t i) {
  switch (i) {
    case 0: return p.theta;
    case 1: return p.x_c;
    case 2: return p.y_c;
    case 3: return p.a;
    default: return p.b;
  }
}

inline double gene(const EllipseParams& p, std::size_t i) {
  EllipseParams copy = p;
  return gene(copy, i);
}

/// Search box for the five genes.
struct ParameterRanges {
  Interval theta{0.0, 360.0};
  Interval x_c{100.0, 412.0};
  Interval y_c{100.0, 412.0};
  Interval a{80.0, 300.0};
  Interval b{80.0, 300.0};

  const Interval& operator[](std::size_t i) const {
    switch (i) {
      case 0: return theta;
      case 1: return x_c;
      case 2: return y_c;
      case 3: return a;
      default: return b;
    }
  }

  /// Defaults for a 512x512 image, rescaled to width x height. Centers scale
  /// with their own dimension; the axis range scales with the smaller one.
  static ParameterRanges scaled_for(long width, long height) {
    const double sx = static_cast<double>(width) / 512.0;
    const double sy = static_cast<double>(height) / 512.0;
    const double s = std::min(sx, sy);
    ParameterRanges r;
    r.x_c = {std::round(100.0 * sx), std::round(412.0 * sx)};
    r.y_c = {std::round(100.0 * sy), std::round(412.0 * sy)};
    r.a = {std::round(80.0 * s), std::round(300.0 * s)};
    r.b = r.a;
    return r;
  }

  void validate() const {
    static constexpr const char* kNames[] = {"theta", "xc", "yc", "a", "b"};
    for (std::size_t i = 0; i < kGeneCount; ++i) {
      const Interval& iv = (*this)[i];
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
        throw ConfigError(std::string("range for ") + kNames[i] + " must be finite with lower <= upper");
      }
    }
    if (a.lo <= 0.0 || b.lo <= 0.0) throw ConfigError("axis ranges must have a positive lower bound");
  }

  bool contains(const EllipseParams& p) const {
    for (std::size_t i = 0; i < kGeneCount; ++i) {
      if (!(*this)[i].contains(gene(p, i))) return false;
    }
    return p.theta >= 0.0 && p.theta < 360.0;
  }

  /// Wraps theta modulo 360, then clamps every gene into its interval.
  EllipseParams conform(EllipseParams p) const {
    p.theta = theta.clamp(normalize_degrees(p.theta));
    p.x_c = x_c.clamp(p.x_c);
    p.y_c = y_c.clamp(p.y_c);
    p.a = a.clamp(p.a);
    p.b = b.clamp(p.b);
    return p;
  }

  friend bool operator==(const ParameterRanges&, const ParameterRanges&) = default;
};

struct GAConfig {
  int population_size = 20;
  int children_per_generation = 40;
  int generations = 200;  ///< budget n
  int m = 5;              ///< crossover count is drawn from [0, m), mutations from [0, 2m)
  int u = 20;             ///< mutation magnitude; each var() draw lies in [-u^2, u^2]
  ParameterRanges ranges;
  std::uint64_t seed = 1;
  std::optional<int> stagnation_window;  ///< defaults to ceil(n / 10)

  int effective_stagnation_window() const {
    if (stagnation_window) return std::max(1, *stagnation_window);
    return std::max(1, (generations + 9) / 10);
  }

  void validate() const {
    if (population_size < 2) throw ConfigError("population_size must be >= 2");
    if (children_per_generation < 1) throw ConfigError("children_per_generation must be >= 1");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    if (m < 1) throw ConfigError("m must be >= 1");
    if (u < 0) throw ConfigError("u must be >= 0");
    if (stagnation_window && *stagnation_window < 1) throw ConfigError("stagnation_window must be >= 1");
    ranges.validate();
  }
};

struct Individual {
  EllipseParams params;
  double fitness = 0.0;

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct FitResult {
  Individual best;
  Metrics metrics;
  int generations_run = 0;
  std::int64_t evaluations = 0;
  double elapsed = 0.0;  ///< seconds
};

/// Snapshot handed to a run observer after every generation.
struct GenerationReport {
  int generation = 0;  ///< 1-based
  int insertions = 0;
  double best_fitness = 0.0;
  std::span<const Individual> population;
};

struct NoObserver {
  void operator()(const GenerationReport&) const {}
};

/// Mutation step: (i * f)^2 - (j * g)^2 with i, j uniform in [0, u] and f, g
/// uniform in [0, 1]. Draws are consumed in the order i, f, j, g.
template <RandomSource R>
double var(R& rng, int u) {
  const auto k = static_cast<std::uint64_t>(u) + 1;
  const double i = static_cast<double>(rng.below(k));
  const double f = rng.unit();
  const double j = static_cast<double>(rng.below(k));
  const double g = rng.unit();
  const double first = i * f;
  const double second = j * g;
  return first * first - second * second;
}

/// Uniform draw inside the ranges (genes drawn in chromosome order), scored.
template <RandomSource R>
Individual random_individual(R& rng, const ParameterRanges& ranges, const LabeledImage& image,
                             const ClassWeights& weights) {
  EllipseParams p;
  for (std::size_t i = 0; i < kGeneCount; ++i) {
    const Interval& iv = ranges[i];
    gene(p, i) = iv.lo + rng.unit() * (iv.hi - iv.lo);
  }
  p = ranges.conform(p);
  return {p, fitness(image, weights, p)};
}

/// Clone of `first`, then random(m) gene copies from `second`, then
/// random(2m) var() perturbations, then conform to the ranges and score.
template <RandomSource R>
Individual make_child(R& rng, const Individual& first, const Individual& second, const GAConfig& config,
                      const LabeledImage& image, const ClassWeights& weights) {
  EllipseParams child = first.params;
  const std::uint64_t crossovers = rng.below(static_cast<std::uint64_t>(config.m));
  for (std::uint64_t k = 0; k < crossovers; ++k) {
    const std::size_t r = rng.below(kGeneCount);
    gene(child, r) = gene(second.params, r);
  }
  const std::uint64_t mutations = rng.below(2 * static_cast<std::uint64_t>(config.m));
  for (std::uint64_t k = 0; k < mutations; ++k) {
    const std::size_t r = rng.below(kGeneCount);
    gene(child, r) += var(rng, config.u);
  }
  child = config.ranges.conform(child);
  return {child, fitness(image, weights, child)};
}

/// Rejects center ranges that cannot place a center on the image.
inline void check_ranges_against_image(const ParameterRanges& ranges, const LabeledImage& image) {
  const Interval cols{0.0, static_cast<double>(image.width() - 1)};
  const Interval rows{0.0, static_cast<double>(image.height() - 1)};
  if (ranges.x_c.hi < cols.lo || ranges.x_c.lo > cols.hi) {
    throw ConfigError("x_c range lies entirely outside the image columns");
  }
  if (ranges.y_c.hi < rows.lo || ranges.y_c.lo > rows.hi) {
    throw ConfigError("y_c range lies entirely outside the image rows");
  }
}

/// Fixed-size pool with the steady-state replacement rule: a newcomer
/// replaces the worst member only when strictly fitter. Among equally bad
/// members the oldest is evicted.
class Population {
 public:
  void add(const Individual& ind) {
    members_.push_back(ind);
    birth_.push_back(next_birth_++);
  }

  std::size_t size() const { return members_.size(); }
  const Individual& operator[](std::size_t i) const { return members_[i]; }
  std::span<const Individual> members() const { return members_; }

  std::size_t worst_index() const {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
      const bool lower = members_[i].fitness < members_[worst].fitness;
      const bool tie_older = members_[i].fitness == members_[worst].fitness && birth_[i] < birth_[worst];
      if (lower || tie_older) worst = i;
    }
    return worst;
  }

  /// First member with the highest fitness.
  std::size_t best_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
      if (members_[i].fitness > members_[best].fitness) best = i;
    }
    return best;
  }

  /// Returns true when `child` entered the pool.
  bool offer(const Individual& child) {
    const std::size_t worst = worst_index();
    if (!(child.fitness > members_[worst].fitness)) return false;
    members_[worst] = child;
    birth_[worst] = next_birth_++;
    return true;
  }

 private:
  std::vector<Individual> members_;
  std::vector<std::uint64_t> birth_;
  std::uint64_t next_birth_ = 0;
};

/// Steady-state genetic search for the ellipse that maximizes fitness().
///
/// Each generation breeds children_per_generation children. A child enters
/// the population as soon as it is strictly fitter than the current worst
/// member, which it replaces (oldest first on ties). The run stops after
/// `generations` generations or after a full stagnation window with no
/// insertion.
template <RandomSource R, typename Observer = NoObserver>
FitResult run_ga(const LabeledImage& image, const ClassWeights& weights, const GAConfig& config, R& rng,
                 Observer&& observer = {}) {
  const auto started = std::chrono::steady_clock::now();
  if (image.empty()) throw ConfigError("image is empty");
  config.validate();
  weights.validate();
  check_ranges_against_image(config.ranges, image);

  const auto pop_size = static_cast<std::size_t>(config.population_size);
  Population population;
  std::int64_t evaluations = 0;
  for (std::size_t i = 0; i < pop_size; ++i) {
    population.add(random_individual(rng, config.ranges, image, weights));
    ++evaluations;
  }

  const int window = config.effective_stagnation_window();
  int stagnant = 0;
  int generations_run = 0;
  for (int gen = 0; gen < config.generations; ++gen) {
    int insertions = 0;
    for (int c = 0; c < config.children_per_generation; ++c) {
      const std::size_t i1 = rng.below(pop_size);
      std::size_t i2 = rng.below(pop_size);
      while (i2 == i1) i2 = rng.below(pop_size);
      const Individual child = make_child(rng, population[i1], population[i2], config, image, weights);
      ++evaluations;
      if (population.offer(child)) ++insertions;
    }
    generations_run = gen + 1;
    observer(GenerationReport{generations_run, insertions, population[population.best_index()].fitness,
                              population.members()});
    stagnant = insertions == 0 ? stagnant + 1 : 0;
    if (stagnant >= window) break;
  }

  FitResult result;
  result.best = population[population.best_index()];
  result.metrics = compute_metrics(image, result.best.params);
  result.generations_run = generations_run;
  result.evaluations = evaluations;
  result.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

/// Convenience overload seeding a fresh stream from config.seed.
template <typename Observer = NoObserver>
  requires std::invocable<Observer&, const GenerationReport&>
FitResult run_ga(const LabeledImage& image, const ClassWeights& weights, const GAConfig& config,
                 Observer&& observer = {}) {
  Rng rng(config.seed);
  return run_ga(image, weights, config, rng, std::forward<Observer>(observer));
}

}  // namespace pcfit
