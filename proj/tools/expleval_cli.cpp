#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "expleval/errors.hpp"
#include "expleval/events.hpp"
#include "expleval/log.hpp"
#include "expleval/reports.hpp"
#include "expleval/simulator.hpp"
#include "expleval/synthetic.hpp"

using namespace expleval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitIngest = 2;
constexpr int kExitInsufficient = 3;

struct IngestArgs {
  std::string ratings, catalog, schema, canonical;
};

int run_ingest(const IngestArgs& a) {
  try {
    auto loaded = load_dataset(a.ratings, a.catalog.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.catalog),
                               a.schema.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.schema));
    for (const auto& r : loaded.rejected) std::cerr << "line " << r.line << ": " << r.message << '\n';
    const auto st = dataset_stats(loaded.dataset);
    std::cout << st.n_users << " users / " << st.n_movies << " movies / " << st.n_ratings << " ratings\n";
    std::printf("%.2f ratings per user, %.2f distinct movies per user, %zu rows rejected\n",
                st.mean_ratings_per_user, st.mean_movies_per_user, loaded.rejected.size());
    if (!a.canonical.empty()) {
      std::ofstream out(a.canonical);
      if (!out) throw IoError("cannot write " + a.canonical);
      write_canonical(loaded.dataset, out);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "ingest failed: " << e.what() << '\n';
    return kExitIngest;
  }
}

struct SimulateArgs {
  std::size_t sessions = 0;
  std::uint64_t seed = 0;
  std::string profile, ratings, catalog, schema, out;
};

int run_simulate(const SimulateArgs& a) {
  Dataset ds;
  try {
    if (a.ratings.empty()) {
      ds = synthetic_dataset();
    } else {
      ds = load_dataset(a.ratings, a.catalog.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.catalog),
                        a.schema.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.schema))
               .dataset;
    }
  } catch (const std::exception& e) {
    std::cerr << "ingest failed: " << e.what() << '\n';
    return kExitIngest;
  }
  try {
    const auto profile = load_profile(a.profile);
    const RecommenderModel model(ds, RecommenderConfig{});
    const auto phrases = PhraseTable::defaults();
    const auto events = simulate(StudyContext{ds, model, phrases}, profile, SimulationOptions{a.sessions, a.seed});
    std::ofstream file;
    if (!a.out.empty()) {
      file.open(a.out, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot write " + a.out);
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    for (const auto& e : events) out << serialize_event(e) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "simulate failed: " << e.what() << '\n';
    return kExitFailure;
  }
}

struct AnalyzeArgs {
  std::string log, table, weights, format = "text", style = "ContextAware";
  bool objective = false;
};

int run_analyze(const AnalyzeArgs& a) {
  try {
    ReportOptions opts;
    opts.format = parse_report_format(a.format);
    opts.correlation_style = parse_style(a.style);
    opts.correlation_objective = a.objective;
    if (!a.weights.empty()) opts.weights = load_weights(a.weights);
    const auto kind = report_kind_of_table(a.table);
    const auto events = read_event_log(std::filesystem::path(a.log));
    const auto sessions = complete_sessions(events);
    if (sessions.empty()) {
      std::cerr << "no complete sessions in " << a.log << '\n';
      return kExitInsufficient;
    }
    std::cout << render_report(kind, sessions, opts);
    return kExitOk;
  } catch (const InsufficientDataError& e) {
    std::cerr << e.what() << '\n';
    return kExitInsufficient;
  } catch (const std::exception& e) {
    std::cerr << "analyze failed: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explanation evaluation toolkit"};
  app.require_subcommand(1);
  std::string level = "warn";
  app.add_option("--log-level", level, "debug, info, warn, error or off");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load a rating file and print a summary");
  ingest_cmd->add_option("--ratings", ingest.ratings, "Delimited rating file")->required();
  ingest_cmd->add_option("--catalog", ingest.catalog, "Delimited movie catalog");
  ingest_cmd->add_option("--schema", ingest.schema, "Factor vocabulary / column mapping document");
  ingest_cmd->add_option("--canonical", ingest.canonical, "Write the dataset as canonical NDJSON");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate complete synthetic sessions as an event log");
  sim_cmd->add_option("--sessions", sim.sessions, "Number of sessions")->required();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->required();
  sim_cmd->add_option("--profile", sim.profile, "Cohort profile (JSON)")->required();
  sim_cmd->add_option("--ratings", sim.ratings, "Rating file (built-in synthetic dataset by default)");
  sim_cmd->add_option("--catalog", sim.catalog, "Movie catalog");
  sim_cmd->add_option("--schema", sim.schema, "Schema document");
  sim_cmd->add_option("--out", sim.out, "Output path (stdout by default)");

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Render a report from an event log");
  an_cmd->add_option("--log", an.log, "Event log (NDJSON)")->required();
  an_cmd->add_option("--table", an.table, "3, 4, 5, 6 or anova")->required();
  an_cmd->add_option("--weights", an.weights, "Metric weights document (table 6)");
  an_cmd->add_option("--format", an.format, "text or json");
  an_cmd->add_option("--style", an.style, "Style for table 5");
  an_cmd->add_flag("--objective", an.objective, "Add decision time and r - r' to table 5");

  CLI11_PARSE(app, argc, argv);

  static const std::map<std::string, log::Level> levels = {{"debug", log::Level::Debug}, {"info", log::Level::Info},
                                                           {"warn", log::Level::Warn},   {"error", log::Level::Error},
                                                           {"off", log::Level::Off}};
  if (auto it = levels.find(level); it != levels.end()) log::set_level(it->second);

  if (*ingest_cmd) return run_ingest(ingest);
  if (*sim_cmd) return run_simulate(sim);
  return run_analyze(an);
}
