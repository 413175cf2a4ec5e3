#pragma once

// Sliding matchweek windows over one league season, window classification by
// spectator attendance, and the per-window home-advantage series.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homeadv/error.hpp"
#include "homeadv/match_data.hpp"
#include "homeadv/rating_engine.hpp"
#include "homeadv/win_calibration.hpp"

namespace homeadv {

enum class AttendanceClass { past, normal, mixed, closed };

inline constexpr AttendanceClass kAllClasses[] = {AttendanceClass::past, AttendanceClass::normal,
                                                  AttendanceClass::mixed, AttendanceClass::closed};

inline std::string_view class_name(AttendanceClass c) {
  switch (c) {
    case AttendanceClass::past: return "Past";
    case AttendanceClass::normal: return "Normal";
    case AttendanceClass::mixed: return "Mixed";
    case AttendanceClass::closed: return "Closed";
  }
  return "?";
}

inline std::optional<AttendanceClass> parse_class(std::string_view name) {
  for (const auto c : kAllClasses) {
    if (class_name(c) == name) return c;
  }
  return std::nullopt;
}

// Seasons starting before this one are classified Past.
inline const Season kReferenceSeason = Season::from_start_year(2019);

inline constexpr int kDefaultWindowWidth = 5;

struct Window {
  std::string league;
  Season season;
  int first_matchweek = 1;
  int end_matchweek = 1;
  std::vector<MatchRecord> matches;
};

struct HomeAdvEstimate {
  std::string league;
  Season season;
  int end_matchweek = 0;
  double home_adv_raw = 0.0;
  double home_adv_win_units = 0.0;
  AttendanceClass attendance_class = AttendanceClass::normal;
  std::size_t n_matches = 0;

  friend bool operator==(const HomeAdvEstimate&, const HomeAdvEstimate&) = default;
};

inline int last_played_matchweek(std::span<const MatchRecord> records) {
  int last = 0;
  for (const auto& r : records) last = std::max(last, r.matchweek);
  return last;
}

// One window per end matchweek from `width` to the last matchweek with a
// played match. Windows never cross a season boundary.
inline std::vector<Window> enumerate_windows(std::span<const MatchRecord> records, const LeagueCalendar& calendar,
                                             int width = kDefaultWindowWidth) {
  if (width < 1) throw ConfigError("window width must be at least 1");
  for (const auto& r : records) {
    if (r.league != calendar.league || r.season != calendar.season) {
      throw DataError("enumerate_windows: record from " + r.league + " " + r.season.label() +
                      " does not match calendar " + calendar.league + " " + calendar.season.label());
    }
  }
  std::vector<Window> windows;
  const int last = last_played_matchweek(records);
  for (int end = width; end <= last; ++end) {
    Window w{calendar.league, calendar.season, end - width + 1, end, {}};
    for (const auto& r : records) {
      if (r.matchweek >= w.first_matchweek && r.matchweek <= end) w.matches.push_back(r);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

inline AttendanceClass classify_window(const Window& window, Season reference = kReferenceSeason) {
  if (window.matches.empty()) {
    throw DataError("classify_window: empty window " + window.league + " " + window.season.label() + " ending " +
                    std::to_string(window.end_matchweek));
  }
  if (window.season < reference) return AttendanceClass::past;
  bool any_closed = false;
  bool any_open = false;
  for (const auto& m : window.matches) {
    (m.attendance == Attendance::behind_closed_doors ? any_closed : any_open) = true;
  }
  if (any_closed && any_open) return AttendanceClass::mixed;
  return any_closed ? AttendanceClass::closed : AttendanceClass::normal;
}

struct WindowPlan {
  int end_matchweek = 0;
  AttendanceClass attendance_class = AttendanceClass::normal;
};

// Window classes derived from the calendar alone, assuming every matchweek in
// 1..last_played has matches.
inline std::vector<WindowPlan> plan_windows(const LeagueCalendar& calendar, int last_played, int width,
                                            Season reference = kReferenceSeason) {
  if (width < 1) throw ConfigError("window width must be at least 1");
  std::vector<WindowPlan> plan;
  for (int end = width; end <= last_played; ++end) {
    WindowPlan p{end, AttendanceClass::normal};
    const int first = end - width + 1;
    if (calendar.season < reference) {
      p.attendance_class = AttendanceClass::past;
    } else if (calendar.first_closed_matchweek) {
      const int fc = *calendar.first_closed_matchweek;
      if (first >= fc) {
        p.attendance_class = AttendanceClass::closed;
      } else if (end >= fc) {
        p.attendance_class = AttendanceClass::mixed;
      }
    }
    plan.push_back(p);
  }
  return plan;
}

struct WindowFit {
  Window window;
  AttendanceClass attendance_class;
  FitResult fit;
};

inline std::vector<WindowFit> fit_windows(std::span<const MatchRecord> records, const LeagueCalendar& calendar,
                                          const FitConfig& fit_config, int width = kDefaultWindowWidth,
                                          Season reference = kReferenceSeason) {
  fit_config.validate();
  std::vector<WindowFit> fits;
  for (auto& w : enumerate_windows(records, calendar, width)) {
    // Postponements can leave a window with no matches at all.
    if (w.matches.empty()) continue;
    const auto cls = classify_window(w, reference);
    try {
      auto fit = fit_window(w.matches, fit_config);
      fits.push_back({std::move(w), cls, std::move(fit)});
    } catch (const std::exception& e) {
      throw NumericError("window " + w.league + " " + w.season.label() + " matchweeks " +
                         std::to_string(w.first_matchweek) + "-" + std::to_string(w.end_matchweek) + ": " + e.what());
    }
  }
  return fits;
}

inline HomeAdvEstimate to_estimate(const WindowFit& wf, const ScaleFactor& scale) {
  return {wf.window.league,
          wf.window.season,
          wf.window.end_matchweek,
          wf.fit.params.home_adv,
          convert_ratings(wf.fit.params, scale).home_adv,
          wf.attendance_class,
          wf.window.matches.size()};
}

inline std::vector<HomeAdvEstimate> estimate_series(std::span<const MatchRecord> records,
                                                    const LeagueCalendar& calendar, const FitConfig& fit_config,
                                                    int width, const ScaleFactor& scale,
                                                    Season reference = kReferenceSeason) {
  std::vector<HomeAdvEstimate> series;
  for (const auto& wf : fit_windows(records, calendar, fit_config, width, reference)) {
    series.push_back(to_estimate(wf, scale));
  }
  return series;
}

// (gap, observed outcome) for every match in every window, using that
// window's fitted ratings.
inline std::vector<OutcomeRecord> observed_outcomes(std::span<const WindowFit> fits) {
  std::vector<OutcomeRecord> out;
  for (const auto& wf : fits) {
    for (const auto& m : wf.window.matches) {
      out.push_back({rating_gap(wf.fit.params, m), match_outcome(m.home_goals, m.away_goals)});
    }
  }
  return out;
}

// As observed_outcomes, but each outcome is one match simulated by the
// scoring process at the fitted gap. Record k uses RNG stream (seed, k).
inline std::vector<OutcomeRecord> simulated_outcomes(std::span<const WindowFit> fits,
                                                     const ScoringProcessConfig& process) {
  process.validate();
  std::vector<OutcomeRecord> out;
  std::uint64_t k = 0;
  for (const auto& wf : fits) {
    for (const auto& m : wf.window.matches) {
      const double gap = rating_gap(wf.fit.params, m);
      auto rng = SplitMix64::stream(process.seed, k++);
      const auto s = simulate_match(logistic(gap), process, rng);
      out.push_back({gap, match_outcome(s.home, s.away)});
    }
  }
  return out;
}

}  // namespace homeadv
