#pragma once

// Plot-ready tables and the human-readable report.

#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "homeadv/detail/text.hpp"
#include "homeadv/error.hpp"
#include "homeadv/rolling_estimator.hpp"
#include "homeadv/stats_tests.hpp"

namespace homeadv {

inline constexpr std::string_view kEstimatesHeader =
    "league,season,end_matchweek,class,home_adv_raw,home_adv_win_units,n_matches";
inline constexpr std::string_view kTestsHeader = "sample_x,sample_y,n_x,n_y,p_value,z_value,rank_sum";
inline constexpr std::string_view kLeagueTestsHeader = "league,sample_x,sample_y,n_x,n_y,p_value,z_value,rank_sum";
inline constexpr std::string_view kBoxplotHeader = "league,class,n,min,q1,median,q3,max";
inline constexpr std::string_view kBasicStatsHeader = "league,period,n_matches,goals_diff_per_match,win_ratio_diff";

struct BoxplotSummary {
  std::string league;
  AttendanceClass attendance_class;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::size_t n = 0;
};

namespace detail {

inline BoxplotSummary summarize_group(std::string league, AttendanceClass cls, std::span<const double> values) {
  BoxplotSummary b{std::move(league), cls};
  b.n = values.size();
  b.min = quantile(values, 0.0);
  b.q1 = quantile(values, 0.25);
  b.median = quantile(values, 0.5);
  b.q3 = quantile(values, 0.75);
  b.max = quantile(values, 1.0);
  return b;
}

}  // namespace detail

// One summary per (league, class) with data, followed by the pooled "ALL"
// groups. Values are home advantage in win-probability units.
inline std::vector<BoxplotSummary> emit_boxplot_data(std::span<const HomeAdvEstimate> estimates) {
  std::map<std::string, std::map<AttendanceClass, std::vector<double>>> groups;
  std::map<AttendanceClass, std::vector<double>> pooled;
  for (const auto& e : estimates) {
    groups[e.league][e.attendance_class].push_back(e.home_adv_win_units);
    pooled[e.attendance_class].push_back(e.home_adv_win_units);
  }
  std::vector<BoxplotSummary> out;
  for (const auto& [league, by_class] : groups) {
    for (const auto cls : kAllClasses) {
      const auto it = by_class.find(cls);
      if (it == by_class.end()) continue;
      out.push_back(detail::summarize_group(league, cls, it->second));
    }
  }
  for (const auto cls : kAllClasses) {
    const auto it = pooled.find(cls);
    if (it == pooled.end()) continue;
    out.push_back(detail::summarize_group(std::string(kOverallLabel), cls, it->second));
  }
  return out;
}

inline void write_estimates_csv(std::ostream& out, std::span<const HomeAdvEstimate> estimates) {
  out << kEstimatesHeader << '\n';
  for (const auto& e : estimates) {
    out << e.league << ',' << e.season.label() << ',' << e.end_matchweek << ',' << class_name(e.attendance_class)
        << ',' << detail::format_double(e.home_adv_raw, 17) << ',' << detail::format_double(e.home_adv_win_units, 17)
        << ',' << e.n_matches << '\n';
  }
}

inline std::vector<HomeAdvEstimate> read_estimates_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<HomeAdvEstimate> out;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::clean_line(line, line_no == 1);
    if (detail::trim(text).empty()) continue;
    if (!have_header) {
      if (detail::header_of(text) != kEstimatesHeader) detail::fail_at(line_no, "unexpected estimates header");
      have_header = true;
      continue;
    }
    const auto f = detail::split(text);
    if (f.size() != 7) detail::fail_at(line_no, "expected 7 columns, found " + std::to_string(f.size()));
    HomeAdvEstimate e;
    e.league = std::string(detail::trim(f[0]));
    const auto season = Season::parse(f[1]);
    const auto end = detail::parse_int<int>(f[2]);
    const auto cls = parse_class(detail::trim(f[3]));
    const auto raw = detail::parse_double(f[4]);
    const auto win = detail::parse_double(f[5]);
    const auto n = detail::parse_int<std::size_t>(f[6]);
    if (!season || !end || !cls || !raw || !win || !n) detail::fail_at(line_no, "malformed estimate row");
    e.season = *season;
    e.end_matchweek = *end;
    e.attendance_class = *cls;
    e.home_adv_raw = *raw;
    e.home_adv_win_units = *win;
    e.n_matches = *n;
    out.push_back(std::move(e));
  }
  if (!have_header) throw DataError("empty estimates file");
  return out;
}

inline void write_tests_csv(std::ostream& out, std::span<const LabeledRankSum> rows, bool with_league) {
  out << (with_league ? kLeagueTestsHeader : kTestsHeader) << '\n';
  for (const auto& r : rows) {
    if (with_league) out << r.league << ',';
    out << class_name(r.sample_x) << ',' << class_name(r.sample_y) << ',' << r.result.n_x << ',' << r.result.n_y
        << ',' << detail::format_double(r.result.p_value, 6) << ',' << detail::format_double(r.result.z_value, 6)
        << ',' << detail::format_double(r.result.rank_sum, 10) << '\n';
  }
}

inline void write_boxplot_csv(std::ostream& out, std::span<const BoxplotSummary> rows) {
  out << kBoxplotHeader << '\n';
  for (const auto& b : rows) {
    out << b.league << ',' << class_name(b.attendance_class) << ',' << b.n << ',' << detail::format_double(b.min)
        << ',' << detail::format_double(b.q1) << ',' << detail::format_double(b.median) << ','
        << detail::format_double(b.q3) << ',' << detail::format_double(b.max) << '\n';
  }
}

struct LeagueBasicStats {
  std::string league;
  BasicStats stats;  // stats.label holds the period
};

inline void write_basic_stats_csv(std::ostream& out, std::span<const LeagueBasicStats> rows) {
  out << kBasicStatsHeader << '\n';
  for (const auto& r : rows) {
    out << r.league << ',' << r.stats.label << ',' << r.stats.n_matches << ','
        << detail::format_double(r.stats.goals_diff_per_match) << ',' << detail::format_double(r.stats.win_ratio_diff)
        << '\n';
  }
}

struct LeagueCalibration {
  std::string league;
  int units = 90;
  double scoring_intensity = 0.0;
  ScaleFactor scale;
  std::size_t n_records = 0;
};

struct WinCurvePoint {
  std::string league;
  double rating_gap = 0.0;
  double simulated = 0.0;
  double standard_error = 0.0;
  double exact = 0.0;
};

struct HomeBalance {
  std::string league;
  Season season;
  std::size_t closed_matches = 0;
  std::optional<double> correlation;  // empty when undefined
};

// Everything the report is rendered from.
struct ReportInputs {
  std::vector<HomeAdvEstimate> estimates;
  std::vector<LeagueCalibration> calibrations;
  ClassComparison overall;
  ClassComparison per_league;
  std::vector<BoxplotSummary> boxplots;
  std::vector<LeagueBasicStats> basic;
  std::vector<HomeBalance> balance;
};

namespace detail {

inline std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

inline void render_tests(std::ostream& out, std::span<const LabeledRankSum> rows, bool with_league) {
  if (with_league) out << fmt("%-16s ", "League");
  out << fmt("%-8s %-8s %6s %6s %12s %9s %14s %s\n", "X", "Y", "N_X", "N_Y", "p-value", "z-value", "ranksum",
             "method");
  for (const auto& r : rows) {
    if (with_league) out << fmt("%-16s ", r.league.c_str());
    out << fmt("%-8s %-8s %6zu %6zu %12.3e %9.3f %14.6g %s\n", std::string(class_name(r.sample_x)).c_str(),
               std::string(class_name(r.sample_y)).c_str(), r.result.n_x, r.result.n_y, r.result.p_value,
               r.result.z_value, r.result.rank_sum, std::string(method_name(r.result.method)).c_str());
  }
}

}  // namespace detail

inline std::string emit_report(const ReportInputs& in) {
  using detail::fmt;
  std::ostringstream out;
  out << "Home advantage by spectator attendance\n";
  out << "======================================\n\n";

  out << "Win-probability calibration\n";
  out << fmt("%-16s %6s %10s %12s %12s %10s\n", "League", "units", "beta", "scale D*", "objective", "records");
  for (const auto& c : in.calibrations) {
    out << fmt("%-16s %6d %10.6f %12.6f %12.6g %10zu\n", c.league.c_str(), c.units, c.scoring_intensity,
               c.scale.value, c.scale.objective, c.n_records);
  }

  out << "\nMedian home advantage (win-probability units)\n";
  out << fmt("%-16s", "League");
  for (const auto cls : kAllClasses) out << fmt(" %16s", std::string(class_name(cls)).c_str());
  out << '\n';
  std::map<std::string, std::map<AttendanceClass, const BoxplotSummary*>> medians;
  std::vector<std::string> league_order;
  for (const auto& b : in.boxplots) {
    if (!medians.contains(b.league)) league_order.push_back(b.league);
    medians[b.league][b.attendance_class] = &b;
  }
  for (const auto& league : league_order) {
    out << fmt("%-16s", league.c_str());
    for (const auto cls : kAllClasses) {
      const auto it = medians[league].find(cls);
      if (it == medians[league].end()) {
        out << fmt(" %16s", "absent");
      } else {
        out << fmt(" %9.4f (%4zu)", it->second->median, it->second->n);
      }
    }
    out << '\n';
  }

  out << "\nRank-sum tests: overall\n";
  detail::render_tests(out, in.overall.rows, false);
  out << "\nRank-sum tests: by league\n";
  detail::render_tests(out, in.per_league.rows, true);

  out << "\nSignificant differences (p < 0.05)\n";
  bool any = false;
  for (const auto* set : {&in.overall, &in.per_league}) {
    for (const auto& r : set->rows) {
      if (r.result.p_value < 0.05) {
        any = true;
        out << fmt("  %-16s %s vs %s: p = %.3e, z = %.3f\n", r.league.c_str(),
                   std::string(class_name(r.sample_x)).c_str(), std::string(class_name(r.sample_y)).c_str(),
                   r.result.p_value, r.result.z_value);
      }
    }
  }
  if (!any) out << "  none\n";

  const auto notices_empty = in.overall.notices.empty() && in.per_league.notices.empty();
  if (!notices_empty) {
    out << "\nNotes\n";
    for (const auto* set : {&in.overall, &in.per_league}) {
      for (const auto& n : set->notices) out << "  " << n << '\n';
    }
  }

  out << "\nBasic statistics (home minus away)\n";
  out << fmt("%-16s %-8s %8s %14s %14s\n", "League", "Period", "matches", "goals diff", "win ratio diff");
  for (const auto& b : in.basic) {
    out << fmt("%-16s %-8s %8zu %14.4f %14.4f\n", b.league.c_str(), b.stats.label.c_str(), b.stats.n_matches,
               b.stats.goals_diff_per_match, b.stats.win_ratio_diff);
  }

  if (!in.balance.empty()) {
    out << "\nClosed-period home matches vs final standing (Pearson)\n";
    for (const auto& h : in.balance) {
      out << fmt("  %-16s %s  closed matches %4zu  correlation ", h.league.c_str(), h.season.label().c_str(),
                 h.closed_matches);
      out << (h.correlation ? fmt("%.4f", *h.correlation) : std::string("undefined")) << '\n';
    }
  }
  return out.str();
}

}  // namespace homeadv
