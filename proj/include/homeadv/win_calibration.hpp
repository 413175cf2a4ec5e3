#pragma once

// Converts score-ratio ratings to win-probability units.
//
// A match is modelled as `units` independent plays. In each play the home side
// scores with probability beta*p, the away side with beta*(1-p), and nobody
// scores with probability 1-beta. A least-squares scale factor D then maps a
// rating gap g onto win probability via logistic(D*g).

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "homeadv/error.hpp"
#include "homeadv/rating_engine.hpp"

namespace homeadv {

struct ScoringProcessConfig {
  int units = 90;
  double scoring_intensity = 0.03;  // beta
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;

  void validate() const {
    if (units < 1) throw ConfigError("units must be positive");
    if (!(scoring_intensity > 0.0 && scoring_intensity <= 1.0)) {
      throw ConfigError("scoring intensity (beta) must lie in (0, 1]");
    }
    if (trials < 1) throw ConfigError("trials must be at least 1");
  }
};

// beta = E[total goals] / units.
inline double scoring_intensity_from_goals(double mean_total_goals, int units) {
  const double beta = mean_total_goals / units;
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw NumericError("scoring intensity from data is " + std::to_string(beta) + ", outside (0, 1]");
  }
  return beta;
}

inline double scoring_intensity_from_data(std::span<const MatchRecord> matches, int units) {
  if (matches.empty()) throw DataError("cannot derive scoring intensity from an empty match set");
  double goals = 0.0;
  for (const auto& m : matches) goals += m.home_goals + m.away_goals;
  return scoring_intensity_from_goals(goals / static_cast<double>(matches.size()), units);
}

// SplitMix64; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Independent stream for (seed, index); results do not depend on the order
  // in which streams are consumed.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed ^ mix(index + 0x632BE59BD9B4E019ULL)));
  }

 private:
  std::uint64_t state_;
};

struct SimulatedScore {
  int home = 0;
  int away = 0;
};

template <typename Rng>
SimulatedScore simulate_match(double score_ratio, const ScoringProcessConfig& config, Rng& rng) {
  const double home_cut = config.scoring_intensity * score_ratio;
  const double any_cut = config.scoring_intensity;
  SimulatedScore s;
  for (int u = 0; u < config.units; ++u) {
    const double x = rng.uniform();
    if (x < home_cut) {
      ++s.home;
    } else if (x < any_cut) {
      ++s.away;
    }
  }
  return s;
}

inline double match_outcome(int home, int away) {
  return home > away ? 1.0 : (home == away ? 0.5 : 0.0);
}

struct OutcomeCounts {
  std::uint64_t wins = 0;
  std::uint64_t draws = 0;
  std::uint64_t losses = 0;

  std::uint64_t total() const { return wins + draws + losses; }
  double win_probability() const { return (wins + 0.5 * draws) / static_cast<double>(total()); }
  // Same simulated matches with home and away swapped.
  double mirrored_win_probability() const { return (losses + 0.5 * draws) / static_cast<double>(total()); }
  // Standard error of the per-trial outcome mean (outcomes in {0, 0.5, 1}).
  double standard_error() const {
    const double n = static_cast<double>(total());
    const double mean = win_probability();
    const double second = (wins + 0.25 * draws) / n;
    return std::sqrt(std::max(0.0, second - mean * mean) / n);
  }
};

inline OutcomeCounts simulate_outcomes(double rating_gap, const ScoringProcessConfig& config) {
  config.validate();
  const double p = logistic(rating_gap);
  OutcomeCounts counts;
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    auto rng = SplitMix64::stream(config.seed, t);
    const auto s = simulate_match(p, config, rng);
    if (s.home > s.away) {
      ++counts.wins;
    } else if (s.home == s.away) {
      ++counts.draws;
    } else {
      ++counts.losses;
    }
  }
  return counts;
}

inline double estimate_win_probability(double rating_gap, const ScoringProcessConfig& config) {
  return simulate_outcomes(rating_gap, config).win_probability();
}

// Antithetic pair (W(g), W(-g)) from one set of simulated matches; the two
// values sum to exactly 1.
inline std::pair<double, double> estimate_win_probability_pair(double rating_gap, const ScoringProcessConfig& config) {
  const auto c = simulate_outcomes(rating_gap, config);
  return {c.win_probability(), c.mirrored_win_probability()};
}

// Exact P(home wins) + 0.5 P(draw) by dynamic programming over the
// goal-difference distribution, O(units^2).
inline double exact_win_probability(double rating_gap, int units, double scoring_intensity) {
  if (units < 1) throw ConfigError("units must be positive");
  const double p = logistic(rating_gap);
  const double up = scoring_intensity * p;
  const double down = scoring_intensity * (1.0 - p);
  const double stay = 1.0 - scoring_intensity;
  const std::size_t width = 2 * static_cast<std::size_t>(units) + 1;
  std::vector<double> dist(width, 0.0), next(width, 0.0);
  const std::size_t zero = static_cast<std::size_t>(units);
  dist[zero] = 1.0;
  for (int u = 0; u < units; ++u) {
    std::fill(next.begin(), next.end(), 0.0);
    const std::size_t lo = zero - static_cast<std::size_t>(u);
    const std::size_t hi = zero + static_cast<std::size_t>(u);
    for (std::size_t d = lo; d <= hi; ++d) {
      const double m = dist[d];
      if (m == 0.0) continue;
      next[d + 1] += up * m;
      next[d - 1] += down * m;
      next[d] += stay * m;
    }
    dist.swap(next);
  }
  double win = 0.0;
  for (std::size_t d = zero + 1; d < width; ++d) win += dist[d];
  return win + 0.5 * dist[zero];
}

struct OutcomeRecord {
  double rating_gap = 0.0;
  double outcome = 0.5;  // 1 win, 0.5 draw, 0 loss
};

struct ScaleFactor {
  double value = 1.0;
  double objective = 0.0;
};

inline double scale_objective(std::span<const OutcomeRecord> records, double d) {
  double sum = 0.0;
  for (const auto& r : records) {
    const double e = r.outcome - logistic(d * r.rating_gap);
    sum += e * e;
  }
  return sum;
}

inline constexpr double kScaleSearchUpper = 50.0;
inline constexpr double kScaleSearchTolerance = 1e-8;

inline constexpr int kScaleScanPoints = 2000;

// Argmin over [0, 50]. The objective can have a second, shallow minimum far out
// on its plateau, so a coarse scan brackets the best region before a
// golden-section refinement. Bracket endpoints are compared against the
// interior optimum; ties resolve toward the smaller D.
inline ScaleFactor fit_scale_factor(std::span<const OutcomeRecord> records) {
  if (records.empty()) throw DataError("fit_scale_factor: no outcome records");
  for (const auto& r : records) {
    // Match outcomes are 0, 0.5 or 1; expected win probabilities are also accepted.
    if (!(r.outcome >= 0.0 && r.outcome <= 1.0) || !std::isfinite(r.rating_gap)) {
      throw DataError("fit_scale_factor: outcome must lie in [0, 1] with a finite rating gap");
    }
  }
  const double step = kScaleSearchUpper / kScaleScanPoints;
  int best_i = 0;
  double best_f = scale_objective(records, 0.0);
  for (int i = 1; i <= kScaleScanPoints; ++i) {
    const double f = scale_objective(records, i * step);
    if (f < best_f) best_f = f, best_i = i;
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(0, best_i - 1) * step;
  double b = std::min(kScaleScanPoints, best_i + 1) * step;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = scale_objective(records, c);
  double fd = scale_objective(records, d);
  while (b - a > kScaleSearchTolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = scale_objective(records, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = scale_objective(records, d);
    }
  }
  ScaleFactor best{0.5 * (a + b), 0.0};
  best.objective = scale_objective(records, best.value);
  for (const double edge : {kScaleSearchUpper, best_i * step, 0.0}) {
    const double f = scale_objective(records, edge);
    if (f < best.objective || (f == best.objective && edge < best.value)) best = {edge, f};
  }
  return best;
}

inline RatingParams convert_ratings(const RatingParams& params, const ScaleFactor& scale) {
  RatingParams out = params;
  for (auto& [team, r] : out.ratings) r *= scale.value;
  out.home_adv *= scale.value;
  return out;
}

}  // namespace homeadv
