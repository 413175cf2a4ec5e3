#pragma once

// Match records, league calendars, ingestion and attendance classification.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homeadv/detail/text.hpp"
#include "homeadv/error.hpp"

namespace homeadv {

enum class Attendance { spectators, behind_closed_doors };

inline std::string_view attendance_token(Attendance a) {
  return a == Attendance::spectators ? "normal" : "closed";
}

inline std::optional<Attendance> parse_attendance(std::string_view token) {
  token = detail::trim(token);
  if (token == "normal") return Attendance::spectators;
  if (token == "closed") return Attendance::behind_closed_doors;
  return std::nullopt;
}

// Season label of the form "2019/20".
class Season {
 public:
  Season() = default;

  static std::optional<Season> parse(std::string_view label) {
    label = detail::trim(label);
    if (label.size() != 7 || label[4] != '/') return std::nullopt;
    const auto start = detail::parse_int<int>(label.substr(0, 4));
    const auto end = detail::parse_int<int>(label.substr(5, 2));
    if (!start || !end || *end != (*start + 1) % 100) return std::nullopt;
    Season s;
    s.start_year_ = *start;
    return s;
  }

  static Season from_start_year(int year) {
    Season s;
    s.start_year_ = year;
    return s;
  }

  int start_year() const { return start_year_; }

  std::string label() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d/%02d", start_year_, (start_year_ + 1) % 100);
    return buf;
  }

  friend auto operator<=>(const Season&, const Season&) = default;

 private:
  int start_year_ = 0;
};

struct MatchRecord {
  std::string league;
  Season season;
  int matchweek = 1;
  std::chrono::year_month_day date{};
  std::string home_team;
  std::string away_team;
  int home_goals = 0;
  int away_goals = 0;
  Attendance attendance = Attendance::spectators;
  // True when the attendance column carried a token for this row. An explicit
  // token takes precedence over the calendar.
  bool attendance_explicit = false;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct LeagueCalendar {
  std::string league;
  Season season;
  int matchweeks = 38;
  std::optional<int> first_closed_matchweek;
  int teams = 20;

  // Number of behind-closed-doors matchweeks in a completed season.
  int closed_matchweeks() const {
    return first_closed_matchweek ? matchweeks - *first_closed_matchweek + 1 : 0;
  }

  void validate() const {
    if (matchweeks < 1) throw DataError("calendar " + league + " " + season.label() + ": matchweeks must be positive");
    if (teams < 2) throw DataError("calendar " + league + " " + season.label() + ": fewer than two teams");
    if (first_closed_matchweek && (*first_closed_matchweek < 1 || *first_closed_matchweek > matchweeks)) {
      throw DataError("calendar " + league + " " + season.label() +
                      ": first_closed_matchweek outside 1.." + std::to_string(matchweeks));
    }
  }
};

struct SeasonSummary {
  std::string league;
  Season season;
  std::size_t total_matches = 0;
  std::size_t normal_matches = 0;
  std::size_t closed_matches = 0;
  std::size_t teams = 0;
};

inline constexpr std::string_view kMatchHeader =
    "league,season,matchweek,date,home_team,away_team,home_goals,away_goals";
inline constexpr std::string_view kMatchHeaderWithAttendance =
    "league,season,matchweek,date,home_team,away_team,home_goals,away_goals,attendance";
inline constexpr std::string_view kCalendarHeader = "league,season,matchweeks,first_closed_matchweek,teams";

namespace detail {

inline std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
  s = trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto y = parse_int<int>(s.substr(0, 4));
  const auto m = parse_int<unsigned>(s.substr(5, 2));
  const auto d = parse_int<unsigned>(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

inline std::string format_date(const std::chrono::year_month_day& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

inline std::string header_of(std::string_view line) {
  std::string out;
  for (const auto& f : split(line)) {
    if (!out.empty()) out += ',';
    out += trim(f);
  }
  return out;
}

[[noreturn]] inline void fail_at(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace detail

// Parses the comma-separated match file. Rows without an attendance token
// default to spectators; apply_calendars() may override them later.
inline std::vector<MatchRecord> parse_match_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool with_attendance = false;
  bool have_header = false;
  std::vector<MatchRecord> records;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::clean_line(line, line_no == 1);
    if (detail::trim(text).empty()) continue;
    if (!have_header) {
      const auto header = detail::header_of(text);
      if (header == kMatchHeaderWithAttendance) {
        with_attendance = true;
      } else if (header != kMatchHeader) {
        detail::fail_at(line_no, "unexpected header '" + header + "', expected '" +
                                     std::string(kMatchHeaderWithAttendance) + "'");
      }
      have_header = true;
      continue;
    }

    const auto fields = detail::split(text);
    const std::size_t expected = with_attendance ? 9 : 8;
    if (fields.size() != expected) {
      detail::fail_at(line_no, "expected " + std::to_string(expected) + " columns, found " +
                                   std::to_string(fields.size()));
    }

    MatchRecord r;
    r.league = std::string(detail::trim(fields[0]));
    if (r.league.empty()) detail::fail_at(line_no, "empty league");
    const auto season = Season::parse(fields[1]);
    if (!season) detail::fail_at(line_no, "bad season label '" + fields[1] + "'");
    r.season = *season;
    const auto mw = detail::parse_int<int>(fields[2]);
    if (!mw || *mw < 1) detail::fail_at(line_no, "matchweek must be a positive integer, got '" + fields[2] + "'");
    r.matchweek = *mw;
    const auto date = detail::parse_date(fields[3]);
    if (!date) detail::fail_at(line_no, "bad date '" + fields[3] + "', expected YYYY-MM-DD");
    r.date = *date;
    r.home_team = std::string(detail::trim(fields[4]));
    r.away_team = std::string(detail::trim(fields[5]));
    if (r.home_team.empty() || r.away_team.empty()) detail::fail_at(line_no, "empty team identifier");
    if (r.home_team == r.away_team) detail::fail_at(line_no, "home and away team are both '" + r.home_team + "'");
    const auto hg = detail::parse_int<int>(fields[6]);
    if (!hg) detail::fail_at(line_no, "non-integer home_goals '" + fields[6] + "'");
    const auto ag = detail::parse_int<int>(fields[7]);
    if (!ag) detail::fail_at(line_no, "non-integer away_goals '" + fields[7] + "'");
    if (*hg < 0 || *ag < 0) detail::fail_at(line_no, "negative goals");
    r.home_goals = *hg;
    r.away_goals = *ag;
    if (with_attendance && !detail::trim(fields[8]).empty()) {
      const auto att = parse_attendance(fields[8]);
      if (!att) detail::fail_at(line_no, "unknown attendance token '" + fields[8] + "' (expected normal|closed)");
      r.attendance = *att;
      r.attendance_explicit = true;
    }
    records.push_back(std::move(r));
  }
  if (!have_header) throw DataError("empty match file");
  return records;
}

// Writes records in the match-file format; rows without an explicit
// attendance token get an empty attendance column.
inline void write_match_file(std::ostream& out, std::span<const MatchRecord> records) {
  out << kMatchHeaderWithAttendance << '\n';
  for (const auto& r : records) {
    out << r.league << ',' << r.season.label() << ',' << r.matchweek << ',' << detail::format_date(r.date) << ','
        << r.home_team << ',' << r.away_team << ',' << r.home_goals << ',' << r.away_goals << ',';
    if (r.attendance_explicit) out << attendance_token(r.attendance);
    out << '\n';
  }
}

inline std::vector<LeagueCalendar> parse_calendar_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<LeagueCalendar> calendars;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::clean_line(line, line_no == 1);
    if (detail::trim(text).empty()) continue;
    if (!have_header) {
      const auto header = detail::header_of(text);
      if (header != kCalendarHeader) {
        detail::fail_at(line_no, "unexpected calendar header '" + header + "', expected '" +
                                     std::string(kCalendarHeader) + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = detail::split(text);
    if (fields.size() != 5) {
      detail::fail_at(line_no, "expected 5 columns, found " + std::to_string(fields.size()));
    }
    LeagueCalendar c;
    c.league = std::string(detail::trim(fields[0]));
    const auto season = Season::parse(fields[1]);
    if (!season) detail::fail_at(line_no, "bad season label '" + fields[1] + "'");
    c.season = *season;
    const auto mw = detail::parse_int<int>(fields[2]);
    if (!mw) detail::fail_at(line_no, "non-integer matchweeks '" + fields[2] + "'");
    c.matchweeks = *mw;
    if (!detail::trim(fields[3]).empty()) {
      const auto fc = detail::parse_int<int>(fields[3]);
      if (!fc) detail::fail_at(line_no, "non-integer first_closed_matchweek '" + fields[3] + "'");
      c.first_closed_matchweek = *fc;
    }
    const auto teams = detail::parse_int<int>(fields[4]);
    if (!teams) detail::fail_at(line_no, "non-integer teams '" + fields[4] + "'");
    c.teams = *teams;
    try {
      c.validate();
    } catch (const DataError& e) {
      detail::fail_at(line_no, e.what());
    }
    calendars.push_back(std::move(c));
  }
  if (!have_header) throw DataError("empty calendar file");
  return calendars;
}

inline void write_calendar_file(std::ostream& out, std::span<const LeagueCalendar> calendars) {
  out << kCalendarHeader << '\n';
  for (const auto& c : calendars) {
    out << c.league << ',' << c.season.label() << ',' << c.matchweeks << ',';
    if (c.first_closed_matchweek) out << *c.first_closed_matchweek;
    out << ',' << c.teams << '\n';
  }
}

inline Attendance classify_attendance(const MatchRecord& record, const LeagueCalendar& calendar) {
  if (record.league != calendar.league || record.season != calendar.season) {
    throw DataError("calendar mismatch: record is " + record.league + " " + record.season.label() +
                    ", calendar is " + calendar.league + " " + calendar.season.label());
  }
  if (record.attendance_explicit) return record.attendance;
  if (calendar.first_closed_matchweek && record.matchweek >= *calendar.first_closed_matchweek) {
    return Attendance::behind_closed_doors;
  }
  return Attendance::spectators;
}

// Calendars keyed by (league, season).
class CalendarBook {
 public:
  CalendarBook() = default;
  explicit CalendarBook(std::span<const LeagueCalendar> calendars) {
    for (const auto& c : calendars) add(c);
  }

  void add(const LeagueCalendar& c) {
    c.validate();
    const auto [it, inserted] = by_key_.emplace(std::make_pair(c.league, c.season), c);
    if (!inserted) throw DataError("duplicate calendar for " + c.league + " " + c.season.label());
  }

  const LeagueCalendar* find(const std::string& league, Season season) const {
    const auto it = by_key_.find({league, season});
    return it == by_key_.end() ? nullptr : &it->second;
  }

  const LeagueCalendar& at(const std::string& league, Season season) const {
    if (const auto* c = find(league, season)) return *c;
    throw DataError("no calendar for " + league + " " + season.label());
  }

  auto begin() const { return by_key_.begin(); }
  auto end() const { return by_key_.end(); }

 private:
  std::map<std::pair<std::string, Season>, LeagueCalendar> by_key_;
};

// Validates matchweeks against each record's calendar and resolves attendance.
inline void apply_calendars(std::span<MatchRecord> records, const CalendarBook& book) {
  for (auto& r : records) {
    const auto& cal = book.at(r.league, r.season);
    if (r.matchweek > cal.matchweeks) {
      throw DataError(r.league + " " + r.season.label() + ": matchweek " + std::to_string(r.matchweek) +
                      " exceeds calendar's " + std::to_string(cal.matchweeks));
    }
    r.attendance = classify_attendance(r, cal);
  }
}

inline SeasonSummary summarize_season(std::span<const MatchRecord> records, const LeagueCalendar& calendar) {
  if (records.empty()) throw DataError("summarize_season: no records");
  SeasonSummary s;
  s.league = records.front().league;
  s.season = records.front().season;
  std::set<std::string_view> teams;
  for (const auto& r : records) {
    if (r.league != s.league || r.season != s.season) {
      throw DataError("summarize_season: mixed league/season input (" + s.league + " " + s.season.label() + " vs " +
                      r.league + " " + r.season.label() + ")");
    }
    ++s.total_matches;
    if (classify_attendance(r, calendar) == Attendance::behind_closed_doors) {
      ++s.closed_matches;
    } else {
      ++s.normal_matches;
    }
    teams.insert(r.home_team);
    teams.insert(r.away_team);
  }
  s.teams = teams.size();
  return s;
}

// Splits records into (league, season) groups, preserving file order within each.
inline std::map<std::pair<std::string, Season>, std::vector<MatchRecord>> group_by_season(
    std::span<const MatchRecord> records) {
  std::map<std::pair<std::string, Season>, std::vector<MatchRecord>> groups;
  for (const auto& r : records) groups[{r.league, r.season}].push_back(r);
  return groups;
}

}  // namespace homeadv
