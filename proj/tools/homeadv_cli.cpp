// homeadv: command-line front end.
//
//   homeadv ingest  --matches M --calendar C
//   homeadv rate    --matches M --calendar C --league L --season S [--from A --to B]
//   homeadv series  --matches M --calendar C            (estimates CSV on stdout)
//   homeadv test    --estimates FILE                    (test tables on stdout)
//   homeadv report  --matches M --calendar C --out DIR  (all artifacts)
//   homeadv synth   --out DIR                           (toy dataset)
//
// Shared flags may come before or after the subcommand, or from --config FILE
// (key = value lines; flags on the command line win).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "homeadv/homeadv.hpp"

namespace {

using namespace homeadv;

struct Options {
  std::string matches, calendar, leagues, seasons, out = "out", scale_source = "simulated";
  int width = kDefaultWindowWidth;
  double alpha = 0.5, tol = 1e-10;
  int max_iters = 10000, units = 90;
  double beta = 0.0;
  bool beta_from_data = false;
  std::uint64_t trials = 100000, seed = 0;

  // rate
  std::string league, season;
  int from = 1, to = -1;
  // test
  std::string estimates;
};

RunConfig to_run_config(const Options& o, const CLI::App& app) {
  RunConfig c;
  c.matches_path = o.matches;
  c.calendar_path = o.calendar;
  for (auto& l : detail::split(o.leagues)) {
    const auto t = std::string(detail::trim(l));
    if (!t.empty()) c.leagues.push_back(t);
  }
  if (!detail::trim(o.seasons).empty()) c.seasons = SeasonRange::parse(detail::trim(o.seasons));
  c.width = o.width;
  c.fit.step_size = o.alpha;
  c.fit.max_iterations = o.max_iters;
  c.fit.convergence_tolerance = o.tol;
  c.units = o.units;
  if (app.count("--beta") > 0) c.beta = o.beta;
  c.trials = o.trials;
  c.seed = o.seed;
  if (o.scale_source == "observed") {
    c.scale_source = ScaleSource::observed;
  } else if (o.scale_source != "simulated") {
    throw ConfigError("--scale-source must be simulated or observed");
  }
  c.out_dir = o.out;
  return c;
}

void require_inputs(const RunConfig& c) {
  if (c.matches_path.empty()) throw ConfigError("--matches is required");
  if (c.calendar_path.empty()) throw ConfigError("--calendar is required");
}

int cmd_ingest(const RunConfig& c) {
  require_inputs(c);
  const auto ds = run_stage("ingest", [&] { return load_dataset(c.matches_path, c.calendar_path, c.leagues, c.seasons); });
  std::cout << "league,season,total_matches,normal_matches,closed_matches\n";
  for (const auto& [key, records] : group_by_season(ds.records)) {
    const auto s = summarize_season(records, ds.calendars.at(key.first, key.second));
    std::cout << key.first << ',' << key.second.label() << ',' << s.total_matches << ',' << s.normal_matches << ','
              << s.closed_matches << '\n';
  }
  return 0;
}

int cmd_rate(const RunConfig& c, const Options& o) {
  require_inputs(c);
  c.fit.validate();
  const auto season = Season::parse(o.season);
  if (!season) throw ConfigError("bad --season '" + o.season + "'");
  const auto ds = run_stage("ingest", [&] { return load_dataset(c.matches_path, c.calendar_path); });
  std::vector<MatchRecord> window;
  for (const auto& r : ds.records) {
    if (r.league == o.league && r.season == *season && r.matchweek >= o.from && (o.to < 0 || r.matchweek <= o.to)) {
      window.push_back(r);
    }
  }
  if (window.empty()) throw DataError("no matches for " + o.league + " " + season->label() + " in the given matchweeks");
  const auto fit = run_stage("rate", [&] { return fit_window(window, c.fit); });
  std::cout << "# matches " << window.size() << ", loss " << detail::format_double(fit.loss) << ", iterations "
            << fit.iterations << ", converged " << (fit.converged ? "yes" : "no") << '\n';
  std::cout << "team,rating\n";
  for (const auto& [team, r] : fit.params.ratings) std::cout << team << ',' << detail::format_double(r) << '\n';
  std::cout << "home_adv," << detail::format_double(fit.params.home_adv) << '\n';
  return 0;
}

int cmd_series(const RunConfig& c) {
  require_inputs(c);
  run_stage("config", [&] {
    c.validate();
    return 0;
  });
  const auto ds = run_stage("ingest", [&] { return load_dataset(c.matches_path, c.calendar_path, c.leagues, c.seasons); });
  const auto out = compute_pipeline(c, ds);
  write_estimates_csv(std::cout, out.report.estimates);
  return 0;
}

int cmd_test(const Options& o) {
  if (o.estimates.empty()) throw ConfigError("--estimates is required");
  auto in = run_stage("ingest", [&] { return open_input(o.estimates, "estimates"); });
  const auto est = run_stage("ingest", [&] { return read_estimates_csv(in); });
  const auto overall = run_stage("test", [&] { return compare_all_classes(est, Grouping::overall); });
  const auto per_league = run_stage("test", [&] { return compare_all_classes(est, Grouping::per_league); });
  write_tests_csv(std::cout, overall.rows, false);
  std::cout << '\n';
  write_tests_csv(std::cout, per_league.rows, true);
  for (const auto* set : {&overall, &per_league}) {
    for (const auto& n : set->notices) std::cerr << "note: " << n << '\n';
  }
  return 0;
}

int cmd_report(const RunConfig& c) {
  require_inputs(c);
  for (const auto& name : run_pipeline(c)) std::cout << (c.out_dir / name).string() << '\n';
  return 0;
}

int cmd_synth(const Options& o, const CLI::App& app) {
  const auto toy = synthetic::toy_dataset(app.count("--seed") ? o.seed : 2020);
  const std::filesystem::path dir = o.out;
  std::filesystem::create_directories(dir);
  std::ofstream m(dir / "matches.csv");
  write_match_file(m, toy.records);
  std::ofstream c(dir / "calendar.csv");
  write_calendar_file(c, toy.calendars);
  if (!m || !c) throw DataError("failed to write toy dataset under " + dir.string());
  std::cout << (dir / "matches.csv").string() << '\n' << (dir / "calendar.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Home advantage estimation by spectator attendance", "homeadv"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Read flags from a key = value file");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--matches", o.matches, "Match results CSV");
  app.add_option("--calendar", o.calendar, "League calendar CSV");
  app.add_option("--leagues", o.leagues, "Comma-separated leagues to keep (default all)");
  app.add_option("--seasons", o.seasons, "Season or range, e.g. 2010/11..2019/20");
  app.add_option("--width", o.width, "Window width in matchweeks")->capture_default_str();
  app.add_option("--alpha", o.alpha, "Initial descent step size")->capture_default_str();
  app.add_option("--max-iters", o.max_iters, "Maximum descent iterations")->capture_default_str();
  app.add_option("--tol", o.tol, "Convergence tolerance on the loss decrease")->capture_default_str();
  app.add_option("--units", o.units, "Scoring opportunities per match")->capture_default_str();
  auto* beta = app.add_option("--beta", o.beta, "Scoring intensity per opportunity");
  app.add_flag("--beta-from-data", o.beta_from_data, "Derive beta per league from mean goals (default)")->excludes(beta);
  app.add_option("--trials", o.trials, "Simulated matches per rating gap on the win curve")->capture_default_str();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--scale-source", o.scale_source, "Outcomes used to fit D*: simulated or observed")
      ->check(CLI::IsMember({"simulated", "observed"}))
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Validate inputs and print per-season match counts");
  auto* rate = app.add_subcommand("rate", "Fit one window and print ratings");
  rate->add_option("--league", o.league, "League")->required();
  rate->add_option("--season", o.season, "Season, e.g. 2019/20")->required();
  rate->add_option("--from", o.from, "First matchweek")->capture_default_str();
  rate->add_option("--to", o.to, "Last matchweek (default: last played)");
  auto* series = app.add_subcommand("series", "Rolling home-advantage estimates as CSV");
  auto* test = app.add_subcommand("test", "Rank-sum comparisons from an estimates CSV");
  test->add_option("--estimates", o.estimates, "Estimates CSV written by series or report")->required();
  auto* report = app.add_subcommand("report", "Run the full pipeline and write all artifacts");
  auto* synth = app.add_subcommand("synth", "Write the toy dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = to_run_config(o, app);
    if (ingest->parsed()) return cmd_ingest(config);
    if (rate->parsed()) return cmd_rate(config, o);
    if (series->parsed()) return cmd_series(config);
    if (test->parsed()) return cmd_test(o);
    if (report->parsed()) return cmd_report(config);
    if (synth->parsed()) return cmd_synth(o, app);
  } catch (const std::exception& e) {
    std::cerr << "homeadv: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 1;
}
