#include "kbbm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "kbbm/errors.hpp"
#include "kbbm/martingales.hpp"
#include "kbbm/report_io.hpp"
#include "kbbm/series.hpp"
#include "kbbm/simulator.hpp"
#include "kbbm/special_math.hpp"
#include "kbbm/spine.hpp"
#include "kbbm/validation.hpp"

#ifndef KBBM_VERSION
#define KBBM_VERSION "0.0.0"
#endif

namespace kbbm::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output_dir = default_output_dir();
};

struct Process {
  double theta = 0.0;
  double beta = 1.0;
  std::string offspring = "binary";
  double x = 1.0;
  std::size_t max_population = 10'000'000;
};

struct Options {
  Common common;
  Process process;
  // closed-form
  std::string kind = "probability";
  double t = 1.0;
  double y = 1.0;
  std::string interval = "0,inf";
  // simulate
  std::string times = "1";
  // check-martingale
  std::string mart_mode = "series";
  int k_max = 2;
  double kappa = 4.0;
  double horizon = 10.0;
  std::size_t max_checkpoints = 256;
  double tail_fraction = 0.5;
  std::size_t replicates = 1000;
  double z_threshold = 4.0;
  // validate-expansion
  std::string mode = "expectation";
  int m = 0;
  std::string t_grid = "5,10,20,40";
  std::string regime;
  double tolerance_multiple = 1.0;
  double ratio_band = 0.15;
  // kesten-rate
  std::string kesten_grid = "10,20,40,80";
  double constant_tolerance = 0.01;
  // spine-estimate
  std::string functional = "indicator";
  double ks_threshold = kDefaultKsThreshold;
};

/// Outcome of one subcommand, turned into files, a manifest and an exit code.
struct Outcome {
  int exit_code = kExitOk;
  bool partial = false;
  std::string status = "ok";
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  json summary = json::object();
};

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = CLI::detail::trim_copy(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw std::invalid_argument(what + ": bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

DriftParams drift_params(const Process& p, const OffspringLaw& law) { return {p.theta, p.beta, law.mean()}; }

SimConfig sim_config(const Options& o) {
  SimConfig c;
  c.law = OffspringLaw::parse(o.process.offspring);
  c.params = drift_params(o.process, c.law);
  c.start_x = o.process.x;
  c.max_population = o.process.max_population;
  c.seed = o.common.seed;
  c.threads = o.common.threads;
  return c;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.common.config, "flat key=value file; flags override its values");
  sub->add_option("--seed", o.common.seed, "master seed");
  sub->add_option("--threads", o.common.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--output-dir", o.common.output_dir, "directory for result files");
}

void add_process(CLI::App* sub, Options& o, bool with_cap) {
  sub->add_option("--theta", o.process.theta, "drift magnitude (motion has drift -theta)");
  sub->add_option("--beta", o.process.beta, "branching rate");
  sub->add_option("--offspring", o.process.offspring, "'binary' or p0,p1,...");
  sub->add_option("--x", o.process.x, "starting position");
  if (with_cap) sub->add_option("--max-population", o.process.max_population, "live population cap");
}

json verdicts_json(const std::vector<Verdict>& verdicts) {
  json out = json::array();
  for (const Verdict& v : verdicts) out.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  return out;
}

int verdict_code(bool passed) { return passed ? kExitOk : kExitVerdictFailed; }

std::string fixed10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

Outcome closed_form(const Options& o, std::ostream& out) {
  const Interval a = Interval::parse(o.interval);
  const OffspringLaw law = OffspringLaw::parse(o.process.offspring);
  double value = 0.0;
  if (o.kind == "probability") {
    value = killed_transition_prob(o.process.x, o.t, o.process.theta, a);
  } else if (o.kind == "expected-count") {
    value = expected_count(o.process.x, o.t, drift_params(o.process, law), a);
  } else if (o.kind == "density") {
    value = killed_transition_density(o.process.x, o.t, o.process.theta, o.y);
  } else if (o.kind == "bessel3-density") {
    value = bessel3_density(o.t, o.process.x, o.y);
  } else {
    throw std::invalid_argument("closed-form: unknown --kind '" + o.kind + "'");
  }
  out << fixed10(value) << '\n';
  Outcome r;
  r.summary = {{"kind", o.kind}, {"value", value}};
  r.files.emplace_back("closed-form.json", r.summary.dump(2) + "\n");
  return r;
}

Outcome simulate_cmd(const Options& o, std::ostream& out) {
  SimConfig c = sim_config(o);
  c.schedule = parse_reals(o.times, "--times");
  const SimResult res = simulate(c);
  Outcome r;
  for (const Snapshot& s : res.snapshots) {
    out << "t=" << format_real(s.time) << " alive=" << s.size() << " branched=" << s.total_ever_branched
        << " absorbed=" << s.absorbed_count << '\n';
  }
  json snaps = json::array();
  for (const Snapshot& s : res.snapshots) {
    snaps.push_back({{"time", s.time},
                     {"alive", s.size()},
                     {"total_ever_branched", s.total_ever_branched},
                     {"absorbed_count", s.absorbed_count}});
  }
  r.summary = {{"snapshots", snaps}, {"cap_exceeded", !res.ok()}};
  r.files.emplace_back("simulate.snapshots.csv", snapshots_csv(res.snapshots));
  if (!res.ok()) {
    r.exit_code = kExitError;
    r.partial = true;
    r.status = "population-cap-exceeded: " + res.message;
  }
  return r;
}

Outcome check_martingale(const Options& o, std::ostream& out) {
  SimConfig c = sim_config(o);
  Outcome r;
  if (o.mart_mode == "series") {
    const CheckpointGrid grid = checkpoint_grid_to_horizon(o.kappa, o.horizon, o.max_checkpoints);
    const SeriesRun run = run_martingale_series(c, grid, o.k_max, o.tail_fraction);
    json limits = json::array();
    for (const MartingaleSeries& s : run.series) {
      limits.push_back({{"k", s.k}, {"limit", s.limit.value}, {"dispersion", s.limit.dispersion}, {"window", s.limit.window}});
      out << "k=" << s.k << " limit=" << format_real(s.limit.value) << " dispersion=" << format_real(s.limit.dispersion)
          << '\n';
    }
    r.summary = {{"mode", "series"}, {"checkpoints", grid.times.size()}, {"limits", limits}};
    r.files.emplace_back("check-martingale.series.csv", series_csv(run.series));
    if (run.status != SimStatus::kCompleted) {
      r.exit_code = kExitError;
      r.partial = true;
      r.status = "population-cap-exceeded: " + run.message;
    }
  } else if (o.mart_mode == "conservation") {
    c.schedule = parse_reals(o.times, "--times");
    const auto rows = martingale_conservation(c, o.k_max, o.replicates, o.common.threads);
    std::string csv = "k,t,mean,std_error,expected,z\n";
    bool ok = true;
    for (const ConservationRow& row : rows) {
      csv += std::to_string(row.k) + ',' + format_real(row.t) + ',' + format_real(row.mean.value) + ',' +
             format_real(row.mean.std_error) + ',' + format_real(row.expected) + ',' + format_real(row.z) + '\n';
      ok = ok && row.z < o.z_threshold;
    }
    out << csv;
    r.summary = {{"mode", "conservation"},
                 {"verdicts", json::array({{{"name", "mean-conservation"}, {"passed", ok}}})}};
    r.files.emplace_back("check-martingale.conservation.csv", csv);
    r.exit_code = verdict_code(ok);
  } else {
    throw std::invalid_argument("check-martingale: unknown --mode '" + o.mart_mode + "'");
  }
  return r;
}

std::string replicates_csv(const PathwiseSummary& p) {
  std::string csv = "replicate,seed,cap_exceeded,survived,m_limit_0,count_half,count_last,observed_last,predicted_last\n";
  for (std::size_t i = 0; i < p.outcomes.size(); ++i) {
    const ReplicateOutcome& q = p.outcomes[i];
    csv += std::to_string(i) + ',' + std::to_string(q.seed) + ',' + (q.cap_exceeded ? "1" : "0") + ',' +
           (q.survived ? "1" : "0") + ',' + (q.m_limits.empty() ? std::string("nan") : format_real(q.m_limits[0])) +
           ',' + std::to_string(q.count_half) + ',' + std::to_string(q.count_last) + ',' +
           format_real(q.observed_last) + ',' + format_real(q.predicted_last) + '\n';
  }
  return csv;
}

Outcome validate_expansion(const Options& o, std::ostream& out) {
  const Interval a = Interval::parse(o.interval);
  std::optional<Regime> requested;
  if (!o.regime.empty()) {
    requested = regime_from_string(o.regime);
    if (!requested) throw std::invalid_argument("validate-expansion: unknown --regime '" + o.regime + "'");
  }
  ExpansionReport report;
  if (o.mode == "expectation") {
    const OffspringLaw law = OffspringLaw::parse(o.process.offspring);
    const std::vector<double> grid = parse_reals(o.t_grid, "--t-grid");
    report = expectation_level_check(o.m, drift_params(o.process, law), o.process.x, a, grid, requested);
  } else if (o.mode == "pathwise") {
    const SimConfig c = sim_config(o);
    if (requested && *requested != regime_for(c.params.theta, a)) {
      throw RegimeMismatch("validate-expansion: --regime does not match theta and interval");
    }
    PathwiseOptions p;
    p.kappa = o.kappa;
    p.horizon = o.horizon;
    p.replicates = o.replicates;
    p.max_checkpoints = o.max_checkpoints;
    p.tail_fraction = o.tail_fraction;
    p.tolerance_multiple = o.tolerance_multiple;
    p.ratio_band = o.ratio_band;
    p.threads = o.common.threads;
    report = pathwise_check(o.m, c, a, p);
  } else {
    throw std::invalid_argument("validate-expansion: unknown --mode '" + o.mode + "'");
  }

  out << "t,observed,predicted,residual,residual_tm\n";
  for (const ReportRow& row : report.rows) {
    out << format_real(row.t) << ',' << format_real(row.observed) << ',' << format_real(row.predicted) << ','
        << format_real(row.residual) << ',' << format_real(row.scaled_residual) << '\n';
  }
  for (const Verdict& v : report.verdicts) out << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';

  Outcome r;
  r.summary = {{"regime", std::string(to_string(report.regime))},
               {"all_passed", report.all_passed()},
               {"verdicts", verdicts_json(report.verdicts)}};
  r.files.emplace_back("validate-expansion.report.csv", report_csv(report));
  r.files.emplace_back("validate-expansion.report.json", report_json(report));
  r.exit_code = verdict_code(report.all_passed());
  if (report.pathwise) {
    const PathwiseSummary& p = *report.pathwise;
    out << "survival_fraction=" << format_real(p.survival_fraction) << " median_ratio=" << format_real(p.median_ratio)
        << " survivors=" << p.survivors << '/' << p.replicates << '\n';
    r.files.emplace_back("validate-expansion.replicates.csv", replicates_csv(p));
    if (p.cap_exceeded > 0) {
      r.exit_code = kExitError;
      r.partial = true;
      r.status = "population-cap-exceeded in " + std::to_string(p.cap_exceeded) + " replicate(s)";
    }
  }
  return r;
}

Outcome kesten_rate(const Options& o, std::ostream& out) {
  const OffspringLaw law = OffspringLaw::parse(o.process.offspring);
  const std::vector<double> grid = parse_reals(o.kesten_grid, "--t-grid");
  const KestenTable table = kesten_rate_check(drift_params(o.process, law), o.process.x, grid, Interval::parse(o.interval));
  const double gap = std::abs(table.fitted_constant / table.leading_constant - 1.0);
  const std::vector<Verdict> verdicts = {
      {"increments-shrinking", table.increments_shrinking, "|increment| strictly decreasing along the t-grid"},
      {"fitted-constant", gap <= o.constant_tolerance,
       "relative gap " + format_real(gap) + " against tolerance " + format_real(o.constant_tolerance)}};
  out << kesten_csv(table);
  out << "fitted_constant=" << format_real(table.fitted_constant)
      << " leading_constant=" << format_real(table.leading_constant) << '\n';
  bool ok = true;
  for (const Verdict& v : verdicts) {
    out << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
    ok = ok && v.passed;
  }
  Outcome r;
  json j = json::parse(kesten_json(table));
  j["verdicts"] = verdicts_json(verdicts);
  r.summary = {{"verdicts", verdicts_json(verdicts)}};
  r.files.emplace_back("kesten-rate.csv", kesten_csv(table));
  r.files.emplace_back("kesten-rate.json", j.dump(2) + "\n");
  r.exit_code = verdict_code(ok);
  return r;
}

Outcome spine_estimate(const Options& o, std::ostream& out) {
  const OffspringLaw law = OffspringLaw::parse(o.process.offspring);
  const DriftParams params = drift_params(o.process, law);
  const double x = o.process.x;
  Outcome r;
  if (o.functional == "bessel3-fit") {
    const GoodnessOfFit fit = bessel3_sample_check(x, o.t, params.theta, o.replicates, o.common.seed, o.ks_threshold,
                                                   o.common.threads);
    r.summary = {{"functional", o.functional},
                 {"ks_distance", fit.ks_distance},
                 {"effective_sample_size", fit.effective_sample_size},
                 {"statistic", fit.statistic},
                 {"threshold", fit.threshold},
                 {"survivors", fit.survivors},
                 {"passed", fit.passed}};
    out << "statistic=" << format_real(fit.statistic) << " threshold=" << format_real(fit.threshold)
        << (fit.passed ? " PASS" : " FAIL") << '\n';
    r.exit_code = verdict_code(fit.passed);
  } else {
    const Interval a = Interval::parse(o.interval);
    SpineFunctional gamma;
    double reference = 0.0;
    if (o.functional == "one") {
      gamma = [](const SpineSummary&) { return 1.0; };
      reference = std::exp(params.growth_rate() * o.t);
    } else if (o.functional == "indicator") {
      gamma = [a](const SpineSummary& s) { return s.survived && a.contains(s.position) ? 1.0 : 0.0; };
      reference = expected_count(x, o.t, params, a);
    } else if (o.functional == "bessel-mass") {
      const double theta = params.theta;
      gamma = [theta](const SpineSummary& s) { return s.survived ? s.position * std::exp(theta * s.position) : 0.0; };
      reference = std::exp(params.compensated_rate() * o.t) * x * std::exp(params.theta * x);
    } else {
      throw std::invalid_argument("spine-estimate: unknown --functional '" + o.functional + "'");
    }
    const Estimate e = many_to_one_estimate(gamma, x, o.t, params, o.replicates, o.common.seed, o.common.threads);
    const double z = z_score(e, Estimate{reference, 0.0, 0});
    r.summary = {{"functional", o.functional}, {"estimate", e.value}, {"std_error", e.std_error},
                 {"replicates", e.replicates}, {"reference", reference},  {"z", z}};
    out << "estimate=" << format_real(e.value) << " std_error=" << format_real(e.std_error)
        << " reference=" << format_real(reference) << " z=" << format_real(z) << '\n';
  }
  r.files.emplace_back("spine-estimate.json", r.summary.dump(2) + "\n");
  return r;
}

// Turns `key = value` lines of the config file into `--key=value` arguments.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::vector<std::string> args;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "--") continue;  // section marker
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "default")) {
      throw std::invalid_argument("config file '" + path + "': sections are not supported (key '" + item.fullname() + "')");
    }
    if (item.name == "config") throw std::invalid_argument("config file '" + path + "': nested config is not allowed");
    args.push_back("--" + item.name + "=" + CLI::detail::join(item.inputs, ","));
  }
  return args;
}

std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

json resolved_config(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    cfg[name] = opt->count() > 0 ? CLI::detail::join(opt->reduced_results(), ",") : opt->get_default_str();
  }
  return cfg;
}

void write_outputs(const Outcome& r, const std::string& subcommand, const Options& o, const json& config,
                   double seconds) {
  const fs::path dir = o.common.output_dir;
  json manifest;
  manifest["subcommand"] = subcommand;
  manifest["config"] = config;
  manifest["config_file"] = o.common.config;
  manifest["seed"] = o.common.seed;
  manifest["threads"] = o.common.threads;
  manifest["version"] = KBBM_VERSION;
  manifest["wall_time_seconds"] = seconds;
  manifest["exit_code"] = r.exit_code;
  manifest["status"] = r.status;
  manifest["partial"] = r.partial;
  manifest["summary"] = r.summary;
  json outputs = json::array();
  for (const auto& [name, content] : r.files) {
    write_file_atomic(dir / name, content);
    outputs.push_back((dir / name).string());
  }
  manifest["outputs"] = outputs;
  write_file_atomic(dir / (subcommand + ".manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace

std::string default_output_dir() {
  const char* env = std::getenv("KBBM_OUTPUT_DIR");
  return env && *env ? std::string(env) : std::string("kbbm-out");
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Branching Brownian motion with absorption: simulation and expansion checks", "kbbm"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", KBBM_VERSION);

  std::map<std::string, std::function<Outcome(const Options&, std::ostream&)>> handlers;

  auto* cf = app.add_subcommand("closed-form", "exact killed-Brownian and Bessel-3 formulas");
  add_common(cf, o);
  add_process(cf, o, false);
  cf->add_option("--kind", o.kind, "probability | expected-count | density | bessel3-density");
  cf->add_option("--t", o.t, "time");
  cf->add_option("--y", o.y, "density argument");
  cf->add_option("--interval", o.interval, "a,b or a,inf");
  handlers["closed-form"] = closed_form;

  auto* sim = app.add_subcommand("simulate", "simulate one trajectory and dump snapshots");
  add_common(sim, o);
  add_process(sim, o, true);
  sim->add_option("--times", o.times, "observation times, comma separated");
  handlers["simulate"] = simulate_cmd;

  auto* mart = app.add_subcommand("check-martingale", "Hermite martingale series or mean conservation");
  add_common(mart, o);
  add_process(mart, o, true);
  mart->add_option("--mode", o.mart_mode, "series | conservation");
  mart->add_option("--k-max", o.k_max, "largest k (order 2k+1)");
  mart->add_option("--kappa", o.kappa, "checkpoint exponent, r_n = n^{1/kappa}");
  mart->add_option("--horizon", o.horizon, "last checkpoint time");
  mart->add_option("--max-checkpoints", o.max_checkpoints, "checkpoint count bound");
  mart->add_option("--tail-fraction", o.tail_fraction, "fraction of checkpoints averaged for the limit");
  mart->add_option("--times", o.times, "conservation times, comma separated");
  mart->add_option("--replicates", o.replicates, "conservation replicates");
  mart->add_option("--z-threshold", o.z_threshold, "conservation pass level in standard errors");
  handlers["check-martingale"] = check_martingale;

  auto* val = app.add_subcommand("validate-expansion", "order-m expansion at expectation level or pathwise");
  add_common(val, o);
  add_process(val, o, true);
  val->add_option("--mode", o.mode, "expectation | pathwise");
  val->add_option("--m", o.m, "expansion order");
  val->add_option("--interval", o.interval, "a,b or a,inf");
  val->add_option("--t-grid", o.t_grid, "expectation-level times, comma separated");
  val->add_option("--regime", o.regime, "optional assertion: drifted | driftless-bounded | driftless-unbounded");
  val->add_option("--kappa", o.kappa, "checkpoint exponent");
  val->add_option("--horizon", o.horizon, "pathwise horizon");
  val->add_option("--replicates", o.replicates, "pathwise replicates");
  val->add_option("--max-checkpoints", o.max_checkpoints, "checkpoint count bound");
  val->add_option("--tail-fraction", o.tail_fraction, "fraction of checkpoints averaged for martingale limits");
  val->add_option("--tolerance-multiple", o.tolerance_multiple, "allowed last/half ratio of median |residual| t^m");
  val->add_option("--ratio-band", o.ratio_band, "allowed |median observed/predicted - 1|");
  handlers["validate-expansion"] = validate_expansion;

  auto* kes = app.add_subcommand("kesten-rate", "compensated growth of the expected count");
  add_common(kes, o);
  add_process(kes, o, false);
  kes->add_option("--interval", o.interval, "a,b or a,inf");
  kes->add_option("--t-grid", o.kesten_grid, "times, comma separated");
  kes->add_option("--constant-tolerance", o.constant_tolerance, "relative tolerance on the fitted constant");
  handlers["kesten-rate"] = kesten_rate;

  auto* sp = app.add_subcommand("spine-estimate", "many-to-one estimates and the Bessel-3 sample check");
  add_common(sp, o);
  add_process(sp, o, false);
  sp->add_option("--functional", o.functional, "one | indicator | bessel-mass | bessel3-fit");
  sp->add_option("--t", o.t, "time");
  sp->add_option("--interval", o.interval, "a,b or a,inf (indicator)");
  sp->add_option("--replicates", o.replicates, "spine replicates");
  sp->add_option("--ks-threshold", o.ks_threshold, "bessel3-fit rejection level");
  handlers["spine-estimate"] = spine_estimate;

  try {
    std::vector<std::string> args = raw_args;
    const std::string config_path = find_config(args);
    if (!config_path.empty() && args.size() > 1) {
      const std::vector<std::string> extra = config_arguments(config_path);
      args.insert(args.begin() + 2, extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);  // CLI11 consumes from the back
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << KBBM_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "kbbm: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "kbbm: " << e.what() << '\n';
    return kExitError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    Outcome r;
    try {
      r = handlers.at(name)(o, out);
    } catch (const PopulationCapExceeded& e) {
      r.exit_code = kExitError;
      r.partial = true;
      r.status = std::string("population-cap-exceeded: ") + e.what();
    }
    write_outputs(r, name, o, resolved_config(sub), elapsed());
    if (r.partial) err << "kbbm: " << r.status << " (partial outputs flagged in the manifest)\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    err << "kbbm: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace kbbm::cli
