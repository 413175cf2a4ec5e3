#pragma once

// End-to-end run: ingest, rolling fits, calibration, class comparisons and
// artifact files.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "homeadv/error.hpp"
#include "homeadv/match_data.hpp"
#include "homeadv/rating_engine.hpp"
#include "homeadv/reporting.hpp"
#include "homeadv/rolling_estimator.hpp"
#include "homeadv/stats_tests.hpp"
#include "homeadv/win_calibration.hpp"

namespace homeadv {

inline constexpr std::string_view kVersion = "1.0.0";

enum class ScaleSource { simulated, observed };

struct SeasonRange {
  Season first;
  Season last;

  bool contains(Season s) const { return first <= s && s <= last; }

  // "2015/16" or "2010/11..2018/19"
  static SeasonRange parse(std::string_view text) {
    const auto dots = text.find("..");
    const auto a = Season::parse(text.substr(0, dots));
    const auto b = dots == std::string_view::npos ? a : Season::parse(text.substr(dots + 2));
    if (!a || !b || *b < *a) throw ConfigError("bad season range '" + std::string(text) + "'");
    return {*a, *b};
  }

  std::string label() const {
    return first == last ? first.label() : first.label() + ".." + last.label();
  }
};

struct RunConfig {
  std::filesystem::path matches_path;
  std::filesystem::path calendar_path;
  std::vector<std::string> leagues;  // empty: all
  std::optional<SeasonRange> seasons;
  int width = kDefaultWindowWidth;
  FitConfig fit;
  int units = 90;
  std::optional<double> beta;  // empty: derived per league from the data
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  ScaleSource scale_source = ScaleSource::simulated;
  std::filesystem::path out_dir = "out";

  void validate() const {
    if (width < 1) throw ConfigError("width must be at least 1");
    fit.validate();
    if (units < 1) throw ConfigError("units must be positive");
    if (beta && !(*beta > 0.0 && *beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
    if (trials < 1) throw ConfigError("trials must be at least 1");
  }

  // key = value lines, readable back as a config file. The output directory is
  // left out so identical runs written to different places match byte for byte.
  std::string echo() const {
    std::ostringstream o;
    o << "matches = " << matches_path.string() << '\n';
    o << "calendar = " << calendar_path.string() << '\n';
    o << "leagues = ";
    for (std::size_t i = 0; i < leagues.size(); ++i) o << (i ? "," : "") << leagues[i];
    o << '\n';
    o << "seasons = " << (seasons ? seasons->label() : std::string()) << '\n';
    o << "width = " << width << '\n';
    o << "alpha = " << detail::format_double(fit.step_size, 17) << '\n';
    o << "max-iters = " << fit.max_iterations << '\n';
    o << "tol = " << detail::format_double(fit.convergence_tolerance, 17) << '\n';
    o << "units = " << units << '\n';
    if (beta) {
      o << "beta = " << detail::format_double(*beta, 17) << '\n';
    } else {
      o << "beta-from-data = true\n";
    }
    o << "trials = " << trials << '\n';
    o << "seed = " << seed << '\n';
    o << "scale-source = " << (scale_source == ScaleSource::simulated ? "simulated" : "observed") << '\n';
    return o.str();
  }
};

// Failure in a named stage; exit_code follows the CLI convention
// (1 usage, 2 data, 3 numeric).
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, int exit_code, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

inline int exit_code_for(const std::exception& e) {
  if (const auto* p = dynamic_cast<const PipelineError*>(&e)) return p->exit_code();
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const NumericError*>(&e)) return 3;
  return 2;
}

template <typename F>
auto run_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(stage, exit_code_for(e), e.what());
  }
}

struct Dataset {
  std::vector<MatchRecord> records;
  CalendarBook calendars;
};

inline std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::exists(path)) throw DataError(std::string(what) + " file not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " file: " + path.string());
  return in;
}

// Reads both files, applies filters and resolves attendance.
inline Dataset load_dataset(const std::filesystem::path& matches_path, const std::filesystem::path& calendar_path,
                            std::span<const std::string> leagues = {},
                            std::optional<SeasonRange> seasons = std::nullopt) {
  Dataset ds;
  {
    auto in = open_input(calendar_path, "calendar");
    try {
      ds.calendars = CalendarBook(parse_calendar_file(in));
    } catch (const DataError& e) {
      throw DataError(calendar_path.string() + ": " + e.what());
    }
  }
  auto in = open_input(matches_path, "matches");
  std::vector<MatchRecord> all;
  try {
    all = parse_match_file(in);
  } catch (const DataError& e) {
    throw DataError(matches_path.string() + ": " + e.what());
  }
  const std::set<std::string> wanted(leagues.begin(), leagues.end());
  for (auto& r : all) {
    if (!wanted.empty() && !wanted.contains(r.league)) continue;
    if (seasons && !seasons->contains(r.season)) continue;
    ds.records.push_back(std::move(r));
  }
  if (ds.records.empty()) throw DataError("no matches left after applying league/season filters");
  apply_calendars(ds.records, ds.calendars);
  return ds;
}

struct PipelineOutputs {
  ReportInputs report;
  std::vector<WinCurvePoint> win_curve;
};

inline std::vector<double> win_curve_gaps() {
  std::vector<double> gaps;
  for (int k = -12; k <= 12; ++k) gaps.push_back(0.25 * k);
  return gaps;
}

inline PipelineOutputs compute_pipeline(const RunConfig& config, const Dataset& ds) {
  PipelineOutputs out;
  auto& rep = out.report;

  std::map<std::string, std::vector<MatchRecord>> by_league;
  for (const auto& r : ds.records) by_league[r.league].push_back(r);

  std::uint64_t league_index = 0;
  for (const auto& [league, records] : by_league) {
    const auto seasons = group_by_season(records);

    std::vector<WindowFit> fits;
    run_stage("series " + league, [&] {
      for (const auto& [key, season_records] : seasons) {
        const auto& cal = ds.calendars.at(key.first, key.second);
        auto f = fit_windows(season_records, cal, config.fit, config.width);
        fits.insert(fits.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
      }
      return 0;
    });
    if (fits.empty()) continue;

    LeagueCalibration cal{league, config.units, 0.0, {}, 0};
    run_stage("calibrate " + league, [&] {
      cal.scoring_intensity = config.beta ? *config.beta : scoring_intensity_from_data(records, config.units);
      const ScoringProcessConfig process{config.units, cal.scoring_intensity, config.trials,
                                         SplitMix64::mix(config.seed ^ SplitMix64::mix(league_index))};
      const auto outcomes =
          config.scale_source == ScaleSource::simulated ? simulated_outcomes(fits, process) : observed_outcomes(fits);
      cal.scale = fit_scale_factor(outcomes);
      cal.n_records = outcomes.size();

      for (const double gap : win_curve_gaps()) {
        const auto counts = simulate_outcomes(gap, process);
        out.win_curve.push_back({league, gap, counts.win_probability(), counts.standard_error(),
                                 exact_win_probability(gap, config.units, cal.scoring_intensity)});
      }
      return 0;
    });
    rep.calibrations.push_back(cal);
    for (const auto& wf : fits) rep.estimates.push_back(to_estimate(wf, cal.scale));

    run_stage("basic-stats " + league, [&] {
      std::map<std::string, std::vector<MatchRecord>> periods;
      for (const auto& r : records) {
        const char* period = r.season < kReferenceSeason ? "Past"
                             : r.attendance == Attendance::behind_closed_doors ? "Closed"
                                                                               : "Normal";
        periods[period].push_back(r);
      }
      for (const char* period : {"Past", "Normal", "Closed"}) {
        if (periods[period].empty()) continue;
        rep.basic.push_back({league, basic_stats(periods[period], period)});
      }

      for (const auto& [key, season_records] : seasons) {
        std::vector<MatchRecord> closed;
        for (const auto& r : season_records) {
          if (r.attendance == Attendance::behind_closed_doors) closed.push_back(r);
        }
        if (closed.empty()) continue;
        HomeBalance hb{league, key.second, closed.size(), std::nullopt};
        try {
          hb.correlation = home_balance_correlation(closed, compute_standings(season_records));
        } catch (const NumericError&) {
          // zero variance: reported as undefined
        }
        rep.balance.push_back(hb);
      }
      return 0;
    });
    ++league_index;
  }
  if (rep.estimates.empty()) {
    throw PipelineError("series", 2, "no estimation windows; every season has fewer matchweeks than the window width");
  }

  run_stage("test", [&] {
    rep.overall = compare_all_classes(rep.estimates, Grouping::overall);
    rep.per_league = compare_all_classes(rep.estimates, Grouping::per_league);
    rep.boxplots = emit_boxplot_data(rep.estimates);
    return 0;
  });
  return out;
}

inline std::map<std::string, std::string> render_artifacts(const RunConfig& config, const PipelineOutputs& out) {
  std::map<std::string, std::string> files;
  const auto& rep = out.report;
  {
    std::ostringstream s;
    write_estimates_csv(s, rep.estimates);
    files["estimates.csv"] = s.str();
  }
  {
    std::ostringstream s;
    write_boxplot_csv(s, rep.boxplots);
    files["boxplot.csv"] = s.str();
  }
  {
    std::ostringstream s;
    write_tests_csv(s, rep.overall.rows, false);
    files["tests_overall.csv"] = s.str();
  }
  {
    std::ostringstream s;
    write_tests_csv(s, rep.per_league.rows, true);
    files["tests_by_league.csv"] = s.str();
  }
  {
    std::ostringstream s;
    write_basic_stats_csv(s, rep.basic);
    files["basic_stats.csv"] = s.str();
  }
  {
    std::ostringstream s;
    s << "league,units,beta,scale_factor,objective,n_records\n";
    for (const auto& c : rep.calibrations) {
      s << c.league << ',' << c.units << ',' << detail::format_double(c.scoring_intensity) << ','
        << detail::format_double(c.scale.value) << ',' << detail::format_double(c.scale.objective) << ','
        << c.n_records << '\n';
    }
    files["calibration.csv"] = s.str();
  }
  {
    std::ostringstream s;
    s << "league,rating_gap,win_prob_simulated,std_error,win_prob_exact\n";
    for (const auto& p : out.win_curve) {
      s << p.league << ',' << detail::format_double(p.rating_gap) << ',' << detail::format_double(p.simulated) << ','
        << detail::format_double(p.standard_error) << ',' << detail::format_double(p.exact) << '\n';
    }
    files["win_curve.csv"] = s.str();
  }
  {
    std::ostringstream s;
    s << "league,season,closed_matches,correlation\n";
    for (const auto& h : rep.balance) {
      s << h.league << ',' << h.season.label() << ',' << h.closed_matches << ','
        << (h.correlation ? detail::format_double(*h.correlation) : std::string()) << '\n';
    }
    files["home_balance.csv"] = s.str();
  }
  {
    std::ostringstream s;
    s << "# homeadv " << kVersion << " run metadata\n";
    s << config.echo();
    for (const auto& c : rep.calibrations) {
      s << "# " << c.league << ": beta = " << detail::format_double(c.scoring_intensity, 17)
        << ", scale = " << detail::format_double(c.scale.value, 17) << '\n';
    }
    files["run_metadata.txt"] = s.str();
  }
  files["report.txt"] = emit_report(rep);
  return files;
}

// Stages every file in a private directory, then renames each into place.
inline void write_artifacts(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path staging = dir / ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  for (const auto& [name, content] : files) {
    std::ofstream f(staging / name, std::ios::binary);
    f << content;
    if (!f) throw DataError("failed to write " + (staging / name).string());
  }
  for (const auto& [name, content] : files) fs::rename(staging / name, dir / name);
  fs::remove_all(staging);
}

// Returns the names of the files written.
inline std::vector<std::string> run_pipeline(const RunConfig& config) {
  run_stage("config", [&] {
    config.validate();
    return 0;
  });
  const auto ds = run_stage("ingest", [&] {
    return load_dataset(config.matches_path, config.calendar_path, config.leagues, config.seasons);
  });
  const auto out = compute_pipeline(config, ds);
  const auto files = render_artifacts(config, out);
  run_stage("write", [&] {
    write_artifacts(config.out_dir, files);
    return 0;
  });
  std::vector<std::string> names;
  for (const auto& [name, content] : files) names.push_back(name);
  return names;
}

}  // namespace homeadv
