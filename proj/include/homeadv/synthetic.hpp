#pragma once

// Synthetic fixtures and seasons: double round-robin schedules and match
// scores drawn from the per-play scoring process.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homeadv/error.hpp"
#include "homeadv/match_data.hpp"
#include "homeadv/rating_engine.hpp"
#include "homeadv/win_calibration.hpp"

namespace homeadv::synthetic {

struct Fixture {
  int matchweek;
  std::size_t home;
  std::size_t away;
};

// Circle-method double round-robin over `teams` (even) entrants:
// 2*(teams-1) matchweeks of teams/2 fixtures, second half with venues swapped.
inline std::vector<Fixture> double_round_robin(std::size_t teams) {
  if (teams < 2 || teams % 2 != 0) throw ConfigError("round-robin needs an even number of teams >= 2");
  const std::size_t rounds = teams - 1;
  std::vector<std::size_t> ring(teams);
  for (std::size_t i = 0; i < teams; ++i) ring[i] = i;
  std::vector<Fixture> first_half;
  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t k = 0; k < teams / 2; ++k) {
      std::size_t a = ring[k];
      std::size_t b = ring[teams - 1 - k];
      // Alternate venues so each team splits home and away.
      if ((round + k) % 2 == 1) std::swap(a, b);
      first_half.push_back({static_cast<int>(round + 1), a, b});
    }
    // Rotate all but the first entry.
    const std::size_t last = ring.back();
    for (std::size_t i = teams - 1; i > 1; --i) ring[i] = ring[i - 1];
    ring[1] = last;
  }
  std::vector<Fixture> all = first_half;
  for (const auto& f : first_half) all.push_back({f.matchweek + static_cast<int>(rounds), f.away, f.home});
  return all;
}

inline std::string team_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Team%02zu", i + 1);
  return buf;
}

struct SeasonSpec {
  std::string league = "SYN";
  Season season = Season::from_start_year(2019);
  std::vector<double> ratings;  // true ratings, one per team
  double home_adv = 0.3;
  int units = 90;
  double scoring_intensity = 0.03;
  std::uint64_t seed = 0;
  std::optional<int> first_closed_matchweek;
  std::optional<double> closed_home_adv;  // home advantage in closed matchweeks, if different
};

inline std::chrono::year_month_day matchweek_date(Season season, int matchweek) {
  using namespace std::chrono;
  const sys_days start = year{season.start_year()} / August / 10;
  return year_month_day{start + days{7 * (matchweek - 1)}};
}

// Schedule with 0-0 placeholders; useful when only fixtures matter.
inline std::vector<MatchRecord> schedule(const LeagueCalendar& calendar, int last_matchweek = -1) {
  const auto fixtures = double_round_robin(static_cast<std::size_t>(calendar.teams));
  const int last = last_matchweek < 0 ? calendar.matchweeks : last_matchweek;
  std::vector<MatchRecord> out;
  for (const auto& f : fixtures) {
    if (f.matchweek > last) continue;
    MatchRecord m;
    m.league = calendar.league;
    m.season = calendar.season;
    m.matchweek = f.matchweek;
    m.date = matchweek_date(calendar.season, f.matchweek);
    m.home_team = team_name(f.home);
    m.away_team = team_name(f.away);
    out.push_back(std::move(m));
  }
  for (auto& m : out) m.attendance = classify_attendance(m, calendar);
  return out;
}

// Full double round-robin with goals from the scoring process. Fixture k
// draws from RNG stream (seed, k).
inline std::vector<MatchRecord> generate_season(const SeasonSpec& spec) {
  const std::size_t teams = spec.ratings.size();
  const LeagueCalendar calendar{spec.league, spec.season, static_cast<int>(2 * (teams - 1)),
                                spec.first_closed_matchweek, static_cast<int>(teams)};
  auto records = schedule(calendar);
  const ScoringProcessConfig process{spec.units, spec.scoring_intensity, 1, spec.seed};
  process.validate();
  std::map<std::string, double> truth;
  for (std::size_t i = 0; i < teams; ++i) truth[team_name(i)] = spec.ratings[i];
  std::uint64_t k = 0;
  for (auto& m : records) {
    const double h = m.attendance == Attendance::behind_closed_doors && spec.closed_home_adv ? *spec.closed_home_adv
                                                                                             : spec.home_adv;
    const double p = predict_score_ratio(truth.at(m.home_team), truth.at(m.away_team), h);
    auto rng = SplitMix64::stream(spec.seed, k++);
    const auto s = simulate_match(p, process, rng);
    m.home_goals = s.home;
    m.away_goals = s.away;
  }
  return records;
}

inline LeagueCalendar calendar_for(const SeasonSpec& spec) {
  const auto teams = spec.ratings.size();
  return {spec.league, spec.season, static_cast<int>(2 * (teams - 1)), spec.first_closed_matchweek,
          static_cast<int>(teams)};
}

// Small three-league dataset for smoke runs. AAA and BBB go behind closed
// doors late in 2019/20; CCC stops at matchweek 10 of 2019/20 with spectators.
struct ToyDataset {
  std::vector<MatchRecord> records;
  std::vector<LeagueCalendar> calendars;
};

inline ToyDataset toy_dataset(std::uint64_t seed = 2020) {
  struct League {
    const char* name;
    std::optional<int> closed_from;
    int last_2019;
  };
  const League leagues[] = {{"AAA", 8, 14}, {"BBB", 10, 14}, {"CCC", std::nullopt, 10}};
  ToyDataset toy;
  std::uint64_t stream = 0;
  for (const auto& league : leagues) {
    auto rng = SplitMix64::stream(seed, 1000 + stream);
    std::vector<double> ratings(8);
    for (auto& r : ratings) r = -0.8 * rng.uniform();
    for (int year = 2017; year <= 2019; ++year) {
      SeasonSpec spec;
      spec.league = league.name;
      spec.season = Season::from_start_year(year);
      spec.ratings = ratings;
      spec.home_adv = 0.35;
      spec.closed_home_adv = 0.1;
      spec.seed = SplitMix64::mix(seed ^ SplitMix64::mix(++stream));
      if (year == 2019) spec.first_closed_matchweek = league.closed_from;
      auto records = generate_season(spec);
      const int last = year == 2019 ? league.last_2019 : 14;
      std::erase_if(records, [&](const MatchRecord& m) { return m.matchweek > last; });
      for (auto& m : records) m.attendance_explicit = true;
      toy.records.insert(toy.records.end(), records.begin(), records.end());
      toy.calendars.push_back(calendar_for(spec));
    }
  }
  return toy;
}

}  // namespace homeadv::synthetic
