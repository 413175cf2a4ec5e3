#pragma once

// Least-squares logistic rating model on score ratios.
//
// For a home team i and away team j with ratings r_i, r_j and league-wide home
// advantage h, the predicted home share of the (smoothed) score is
//
//   p = 1 / (1 + exp(-(r_i + h - r_j)))
//
// and the observed share adds one goal to each side, s = (g_i+1)/(g_i+g_j+2).
// Ratings and h minimize sum (s - p)^2 by steepest descent.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "homeadv/error.hpp"
#include "homeadv/match_data.hpp"

namespace homeadv {

struct RatingParams {
  std::map<std::string, double> ratings;
  double home_adv = 0.0;
};

struct RatingGradient {
  std::map<std::string, double> ratings;
  double home_adv = 0.0;
};

struct FitConfig {
  double step_size = 0.5;
  int max_iterations = 10000;
  double convergence_tolerance = 1e-10;
  double initial_rating = 0.0;

  void validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step size must be positive and finite");
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
    if (!(convergence_tolerance > 0.0)) throw ConfigError("convergence tolerance must be positive");
    if (!std::isfinite(initial_rating)) throw ConfigError("initial rating must be finite");
  }
};

struct FitResult {
  RatingParams params;          // normalized: top rating is 0
  double loss = 0.0;            // sum of squared residuals
  std::vector<double> residuals;  // s - p per match, input order
  int iterations = 0;           // accepted descent steps
  double final_step_size = 0.0;
  bool converged = false;
};

inline double modified_score_ratio(int home_goals, int away_goals) {
  return (home_goals + 1.0) / (home_goals + away_goals + 2.0);
}

inline double logistic(double x) {
  // Both branches avoid overflow in exp for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double predict_score_ratio(double r_home, double r_away, double home_adv) {
  return logistic(r_home + home_adv - r_away);
}

// One fitting target: the home share of the smoothed score.
struct ScoreObservation {
  std::string home_team;
  std::string away_team;
  double score_ratio = 0.5;
};

inline std::vector<ScoreObservation> observations(std::span<const MatchRecord> matches) {
  std::vector<ScoreObservation> out;
  out.reserve(matches.size());
  for (const auto& m : matches) {
    out.push_back({m.home_team, m.away_team, modified_score_ratio(m.home_goals, m.away_goals)});
  }
  return out;
}

namespace detail {

// Matches compiled against a dense team index; the last parameter slot is h.
struct CompiledWindow {
  struct Row {
    std::size_t home;
    std::size_t away;
    double target;
  };
  std::vector<std::string> teams;
  std::vector<Row> rows;

  std::size_t home_adv_slot() const { return teams.size(); }

  static CompiledWindow from(std::span<const ScoreObservation> obs) {
    CompiledWindow w;
    std::map<std::string, std::size_t> index;
    for (const auto& o : obs) {
      index.emplace(o.home_team, 0);
      index.emplace(o.away_team, 0);
    }
    for (auto& [team, slot] : index) {
      slot = w.teams.size();
      w.teams.push_back(team);
    }
    w.rows.reserve(obs.size());
    for (const auto& o : obs) w.rows.push_back({index.at(o.home_team), index.at(o.away_team), o.score_ratio});
    return w;
  }

  // theta = [ratings..., h]
  double loss(std::span<const double> theta) const {
    const double h = theta[home_adv_slot()];
    double sum = 0.0;
    for (const auto& r : rows) {
      const double e = r.target - logistic(theta[r.home] + h - theta[r.away]);
      sum += e * e;
    }
    return sum;
  }

  double loss_and_gradient(std::span<const double> theta, std::span<double> grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t hs = home_adv_slot();
    const double h = theta[hs];
    double sum = 0.0;
    for (const auto& r : rows) {
      const double p = logistic(theta[r.home] + h - theta[r.away]);
      const double e = r.target - p;
      sum += e * e;
      const double g = -2.0 * e * p * (1.0 - p);
      grad[r.home] += g;
      grad[hs] += g;
      grad[r.away] -= g;
    }
    return sum;
  }
};

inline std::vector<double> theta_from(const CompiledWindow& w, const RatingParams& params) {
  std::vector<double> theta(w.teams.size() + 1);
  for (std::size_t i = 0; i < w.teams.size(); ++i) {
    const auto it = params.ratings.find(w.teams[i]);
    if (it == params.ratings.end()) throw DataError("no rating for team '" + w.teams[i] + "'");
    theta[i] = it->second;
  }
  theta[w.home_adv_slot()] = params.home_adv;
  return theta;
}

}  // namespace detail

inline RatingParams normalize(const RatingParams& params) {
  if (params.ratings.empty()) throw DataError("normalize: no ratings");
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& [team, r] : params.ratings) top = std::max(top, r);
  RatingParams out = params;
  for (auto& [team, r] : out.ratings) r -= top;
  return out;
}

inline double loss(const RatingParams& params, std::span<const MatchRecord> matches) {
  if (matches.empty()) return 0.0;
  const auto w = detail::CompiledWindow::from(observations(matches));
  return w.loss(detail::theta_from(w, params));
}

inline RatingGradient gradient(const RatingParams& params, std::span<const MatchRecord> matches) {
  RatingGradient out;
  if (matches.empty()) return out;
  const auto w = detail::CompiledWindow::from(observations(matches));
  const auto theta = detail::theta_from(w, params);
  std::vector<double> grad(theta.size());
  w.loss_and_gradient(theta, grad);
  for (std::size_t i = 0; i < w.teams.size(); ++i) out.ratings[w.teams[i]] = grad[i];
  out.home_adv = grad[w.home_adv_slot()];
  return out;
}

// Full-batch steepest descent from a cold start. A trial step that would raise
// the loss is rejected and the step size halved for the remainder of the fit,
// so accepted iterates have non-increasing loss. Stops once an accepted step
// lowers the loss by less than the tolerance.
inline FitResult fit_observations(std::span<const ScoreObservation> obs, const FitConfig& config = {}) {
  config.validate();
  if (obs.empty()) throw DataError("fit_window: no matches");
  for (const auto& o : obs) {
    if (o.home_team == o.away_team) throw DataError("team '" + o.home_team + "' cannot play itself");
    if (!(o.score_ratio >= 0.0 && o.score_ratio <= 1.0)) throw DataError("score ratio outside [0, 1]");
  }

  const auto w = detail::CompiledWindow::from(obs);
  const std::size_t n = w.teams.size() + 1;
  std::vector<double> theta(n, config.initial_rating);
  theta[w.home_adv_slot()] = 0.0;
  std::vector<double> grad(n);
  std::vector<double> trial(n);

  double alpha = config.step_size;
  double current = w.loss_and_gradient(theta, grad);
  if (!std::isfinite(current)) throw NumericError("fit_window: non-finite initial loss");

  FitResult result;
  for (int it = 0; it < config.max_iterations; ++it) {
    double grad_norm2 = 0.0;
    bool finite = true;
    for (std::size_t k = 0; k < n; ++k) {
      trial[k] = theta[k] - alpha * grad[k];
      grad_norm2 += grad[k] * grad[k];
      finite = finite && std::isfinite(trial[k]);
    }
    if (grad_norm2 == 0.0) {
      result.converged = true;
      break;
    }
    const double next = finite ? w.loss(trial) : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(next)) {
      throw NumericError("fit_window: loss became non-finite; use a smaller step size (alpha)");
    }
    if (next <= current) {
      const double decrease = current - next;
      theta.swap(trial);
      current = w.loss_and_gradient(theta, grad);
      ++result.iterations;
      if (decrease < config.convergence_tolerance) {
        result.converged = true;
        break;
      }
    } else {
      alpha *= 0.5;
      // First-order predicted decrease already below tolerance.
      if (alpha * grad_norm2 < config.convergence_tolerance) {
        result.converged = true;
        break;
      }
    }
  }

  RatingParams raw;
  for (std::size_t i = 0; i < w.teams.size(); ++i) raw.ratings[w.teams[i]] = theta[i];
  raw.home_adv = theta[w.home_adv_slot()];
  result.params = normalize(raw);
  result.final_step_size = alpha;

  result.residuals.reserve(w.rows.size());
  double sum = 0.0;
  for (const auto& r : w.rows) {
    const double e = r.target - logistic(theta[r.home] + raw.home_adv - theta[r.away]);
    result.residuals.push_back(e);
    sum += e * e;
  }
  result.loss = sum;
  return result;
}

inline FitResult fit_window(std::span<const MatchRecord> matches, const FitConfig& config = {}) {
  return fit_observations(observations(matches), config);
}

// Rating gap r_home + h - r_away for a match under fitted params.
inline double rating_gap(const RatingParams& params, const MatchRecord& m) {
  return params.ratings.at(m.home_team) + params.home_adv - params.ratings.at(m.away_team);
}

}  // namespace homeadv
