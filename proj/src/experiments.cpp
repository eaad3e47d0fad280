#include "hcantor/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hcantor/dim_entropy.hpp"
#include "hcantor/error.hpp"

namespace hcantor {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kZ95 = 1.959963984540054;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t s = seed ^ (salt * 0x9e3779b97f4a7c15ull);
  return splitmix64(s);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_integer(const std::string& text, const std::string& key) {
  T value{};
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "config key '" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                "config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorCode::InvalidArgument,
              "config key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    std::istringstream words(item);
    std::string w;
    while (words >> w) out.push_back(parse_real(w, key));
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  return out;
}

struct ConfigKey {
  const char* section;
  const char* name;
  const char* help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define HC_INT_KEY(sec, key, field, T, help)                                   \
  ConfigKey {                                                                  \
    sec, key, help,                                                            \
        [](ExperimentConfig& c, const std::string& v) {                        \
          c.field = parse_integer<T>(v, sec "." key);                          \
        },                                                                     \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }      \
  }
#define HC_REAL_KEY(sec, key, field, help)                                     \
  ConfigKey {                                                                  \
    sec, key, help,                                                            \
        [](ExperimentConfig& c, const std::string& v) {                        \
          c.field = parse_real(v, sec "." key);                                \
        },                                                                     \
        [](const ExperimentConfig& c) { return format_real(c.field); }         \
  }
#define HC_BOOL_KEY(sec, key, field, help)                                     \
  ConfigKey {                                                                  \
    sec, key, help,                                                            \
        [](ExperimentConfig& c, const std::string& v) {                        \
          c.field = parse_bool(v, sec "." key);                                \
        },                                                                     \
        [](const ExperimentConfig& c) {                                        \
          return std::string(c.field ? "true" : "false");                      \
        }                                                                      \
  }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"sequence", "kind", "constant | periodic | explicit (prefix cycled past its end)",
       [](ExperimentConfig& c, const std::string& v) {
         c.sequence.kind = parse_sequence_kind(trim(v));
       },
       [](const ExperimentConfig& c) {
         return std::string(to_string(c.sequence.kind));
       }},
      {"sequence", "values", "comma-separated ratios a_n, each in (0, 1/2)",
       [](ExperimentConfig& c, const std::string& v) {
         c.sequence.values = parse_list(v, "sequence.values");
       },
       [](const ExperimentConfig& c) { return format_list(c.sequence.values); }},

      HC_INT_KEY("wos", "depth", wos.depth, int,
                 "generation of the absorbing approximation K_depth (<= 12)"),
      HC_REAL_KEY("wos", "absorb_epsilon", wos.absorb_epsilon,
                  "absorption distance; 0 selects l(depth) * 1e-3"),
      HC_REAL_KEY("wos", "start_radius", wos.start_radius,
                  "walkers start uniformly on this circle about (0.5, 0.5)"),
      HC_REAL_KEY("wos", "outer_radius", wos.outer_radius,
                  "crossing this circle triggers an exact exterior re-entry"),
      HC_REAL_KEY("wos", "reentry_radius", wos.reentry_radius,
                  "circle the exterior Poisson kernel jumps back onto"),
      HC_INT_KEY("wos", "max_steps", wos.max_steps, std::uint64_t,
                 "jumps before a walker is discarded"),

      HC_INT_KEY("campaign", "walkers", campaign.walkers, std::uint64_t,
                 "walkers per campaign"),
      HC_INT_KEY("campaign", "seed", campaign.seed, std::uint64_t,
                 "master seed; every derived stream is a function of it"),
      HC_INT_KEY("campaign", "workers", campaign.workers, unsigned,
                 "threads per campaign (results do not depend on it)"),

      HC_INT_KEY("statistics", "count_floor", statistics.count_floor,
                 std::uint64_t, "ratio statistics skip cells below this count"),
      HC_INT_KEY("statistics", "bootstrap_resamples",
                 statistics.bootstrap_resamples, int,
                 "multinomial resamples for bootstrap intervals"),
      HC_INT_KEY("statistics", "bootstrap_seed", statistics.bootstrap_seed,
                 std::uint64_t, "seed of the bootstrap streams"),
      HC_INT_KEY("statistics", "local_dimension_samples",
                 statistics.local_dimension_samples, std::size_t,
                 "exit addresses drawn for the local-dimension distribution"),

      {"continuity", "deltas", "perturbation sizes delta (comma-separated)",
       [](ExperimentConfig& c, const std::string& v) {
         c.continuity.deltas = parse_list(v, "continuity.deltas");
       },
       [](const ExperimentConfig& c) { return format_list(c.continuity.deltas); }},
      {"continuity", "pattern", "alternating | constant-sign signs s_n",
       [](ExperimentConfig& c, const std::string& v) {
         c.continuity.pattern = parse_perturbation_pattern(trim(v));
       },
       [](const ExperimentConfig& c) {
         return std::string(to_string(c.continuity.pattern));
       }},
      HC_BOOL_KEY("continuity", "control", continuity.control,
                  "also run delta = 0 with an independent seed"),

      {"gap", "measure", "harmonic | uniform (synthetic measure, no sampling)",
       [](ExperimentConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t != "harmonic" && t != "uniform") {
           throw Error(ErrorCode::InvalidArgument,
                       "gap.measure must be harmonic or uniform");
         }
         c.gap.synthetic_uniform = t == "uniform";
       },
       [](const ExperimentConfig& c) {
         return std::string(c.gap.synthetic_uniform ? "uniform" : "harmonic");
       }},
      HC_INT_KEY("gap", "cantor_n_max", gap.cantor_n_max, int,
                 "last generation of the dim K tail window"),

      HC_INT_KEY("harnack", "n", harnack.n, int, "generation of I and I'"),
      HC_INT_KEY("harnack", "m", harnack.m, int, "generation of L"),
      HC_INT_KEY("harnack", "k_max", harnack.k_max, int,
                 "offsets k = 1..k_max enter the decay fit"),
      HC_REAL_KEY("harnack", "min_r_squared", harnack.min_r_squared,
                  "fit quality required by the decay verdict"),

      HC_INT_KEY("delta", "j", delta.j, int, "generation of J in Delta_j^k"),
      HC_INT_KEY("delta", "k_max", delta.k_max, int, "k = 1..k_max"),

      HC_INT_KEY("oracle", "walkers", oracle.walkers, std::uint64_t,
                 "lattice-walk oracle walkers"),
      HC_REAL_KEY("oracle", "spacing", oracle.spacing,
                  "lattice spacing h; 0 selects l(depth) / 8"),
      HC_REAL_KEY("oracle", "start_radius", oracle.start_radius,
                  "oracle start / re-entry circle"),
      HC_REAL_KEY("oracle", "outer_radius", oracle.outer_radius,
                  "oracle walkers crossing it restart uniformly"),
      HC_REAL_KEY("oracle", "tolerance", oracle.tolerance,
                  "max |p_wos - p_oracle| accepted"),
      HC_INT_KEY("oracle", "richardson_walkers", oracle.richardson_walkers,
                 std::uint64_t, "walkers for the h vs h/2 check (0 skips)"),

      {"output", "dir", "output directory",
       [](ExperimentConfig& c, const std::string& v) { c.output.dir = trim(v); },
       [](const ExperimentConfig& c) { return c.output.dir; }},
      HC_BOOL_KEY("output", "plots", output.plots, "emit SVG plots"),
  };
  return keys;
}

#undef HC_INT_KEY
#undef HC_REAL_KEY
#undef HC_BOOL_KEY

json metric(double value, double sigma) {
  return {{"value", value}, {"sigma", sigma}};
}

json metric_ci(double value, const Interval& ci) {
  return {{"value", value}, {"ci", {ci.lo, ci.hi}}};
}

struct Campaign {
  CylinderMeasureTable table;
  json stats;
};

Campaign campaign(const ExperimentConfig& config, const ScaleSequence& seq,
                  std::uint64_t seed) {
  CampaignStats stats;
  CylinderMeasureTable table =
      run_campaign(seq, config.wos_params(seq), config.campaign.walkers, seed,
                   config.campaign.workers, &stats);
  json s = {{"sequence", seq.describe()},
            {"seed", seed},
            {"walkers", config.campaign.walkers},
            {"n_effective", table.n_effective()},
            {"discarded", table.metadata().discarded},
            {"mean_steps", static_cast<double>(stats.total_steps) /
                               static_cast<double>(config.campaign.walkers)},
            {"mean_reentries", static_cast<double>(stats.reentries) /
                                   static_cast<double>(config.campaign.walkers)}};
  return {std::move(table), std::move(s)};
}

// The configuration an analysis of `given` runs under: wos.depth follows
// the table depth.
ExperimentConfig effective_config(const ExperimentConfig& config,
                                  const OptionalTable& given) {
  ExperimentConfig c = config;
  if (given) c.wos.depth = given->depth();
  return c;
}

// A fresh campaign, or the given table in its place.
Campaign obtain_table(const ExperimentConfig& config, const ScaleSequence& seq,
                      const OptionalTable& given, std::uint64_t& walkers_run) {
  if (given) {
    const TableMetadata& meta = given->metadata();
    require(meta.exact || meta.seq_fingerprint.empty() ||
                meta.seq_fingerprint == seq.fingerprint(),
            "table was sampled for a different scale sequence");
    return {*given, json::parse(given->header_json())};
  }
  walkers_run += config.campaign.walkers;
  return campaign(config, seq, config.campaign.seed);
}

json base_result(ExperimentKind kind, const ExperimentConfig& config) {
  return {{"kind", std::string(to_string(kind))},
          {"inputs", config.to_json()},
          {"metrics", json::object()},
          {"verdicts", json::object()},
          {"timing", json::object()}};
}

void finish_timing(json& result, Clock::time_point t0,
                   std::uint64_t walkers_run) {
  const double secs = seconds_since(t0);
  result["timing"] = {{"wall_seconds", secs},
                      {"walkers", walkers_run},
                      {"walkers_per_second",
                       secs > 0.0 ? static_cast<double>(walkers_run) / secs : 0.0}};
}

EntropyOptions entropy_options(const ExperimentConfig& config) {
  EntropyOptions o;
  o.bootstrap_resamples = config.statistics.bootstrap_resamples;
  o.bootstrap_seed = config.statistics.bootstrap_seed;
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Sample: return "sample";
    case ExperimentKind::Dims: return "dims";
    case ExperimentKind::Continuity: return "continuity";
    case ExperimentKind::Gap: return "gap";
    case ExperimentKind::Harnack: return "harnack";
    case ExperimentKind::Delta: return "delta";
    case ExperimentKind::OracleCompare: return "oracle-compare";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (ExperimentKind k :
       {ExperimentKind::Sample, ExperimentKind::Dims, ExperimentKind::Continuity,
        ExperimentKind::Gap, ExperimentKind::Harnack, ExperimentKind::Delta,
        ExperimentKind::OracleCompare}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown experiment '" + std::string(text) + "'");
}

ScaleSequence SequenceSpec::build() const {
  switch (kind) {
    case SequenceKind::Constant:
      require(values.size() == 1, "a constant sequence takes exactly one value");
      return ScaleSequence::constant(values[0]);
    case SequenceKind::Periodic:
      return ScaleSequence::periodic(values);
    case SequenceKind::ExplicitPrefix:
      return ScaleSequence::explicit_prefix(values);
    case SequenceKind::Perturbation:
      break;
  }
  throw Error(ErrorCode::InvalidArgument,
              "perturbation sequences are built by the continuity sweep");
}

WosParams ExperimentConfig::wos_params(const ScaleSequence& seq) const {
  WosParams p = WosParams::defaults(seq, wos.depth);
  if (wos.absorb_epsilon > 0.0) p.absorb_epsilon = wos.absorb_epsilon;
  p.start_radius = wos.start_radius;
  p.outer_radius = wos.outer_radius;
  p.reentry_radius = wos.reentry_radius;
  p.max_steps = wos.max_steps;
  return p;
}

GridOracleParams ExperimentConfig::oracle_params() const {
  GridOracleParams p;
  p.depth = wos.depth;
  p.spacing = oracle.spacing;
  p.start_radius = oracle.start_radius;
  p.outer_radius = oracle.outer_radius;
  p.walkers = oracle.walkers;
  return p;
}

ScanOptions ExperimentConfig::scan_options() const {
  ScanOptions o;
  o.count_floor = statistics.count_floor;
  o.bootstrap_resamples = statistics.bootstrap_resamples;
  o.bootstrap_seed = statistics.bootstrap_seed;
  return o;
}

void ExperimentConfig::validate(ExperimentKind kind) const {
  const ScaleSequence seq = sequence.build();
  require(campaign.walkers >= 1, "campaign.walkers must be >= 1");
  require(statistics.bootstrap_resamples >= 0,
          "statistics.bootstrap_resamples must be >= 0");
  const bool needs_campaign =
      !(kind == ExperimentKind::Gap && gap.synthetic_uniform);
  if (needs_campaign) wos_params(seq).validate(seq);
  switch (kind) {
    case ExperimentKind::Sample:
      break;
    case ExperimentKind::Dims:
    case ExperimentKind::Gap:
      require(wos.depth >= 3, "dimension estimates need wos.depth >= 3");
      require(wos.depth <= kMaxTableDepth, "wos.depth too large");
      require(gap.cantor_n_max >= 1, "gap.cantor_n_max must be >= 1");
      break;
    case ExperimentKind::Continuity:
      require(wos.depth >= 3, "dimension estimates need wos.depth >= 3");
      require(!continuity.deltas.empty(), "continuity.deltas is empty");
      for (double d : continuity.deltas) {
        require(d > 0.0, "continuity deltas must be positive (control is separate)");
        // Throws on any perturbed ratio outside (0, 1/2).
        const ScaleSequence p =
            ScaleSequence::perturbation(seq, d, continuity.pattern);
        wos_params(p).validate(p);
      }
      break;
    case ExperimentKind::Harnack:
      require(harnack.n >= 1 && harnack.m >= 0, "harnack needs n >= 1, m >= 0");
      require(harnack.k_max >= 2, "harnack.k_max must be >= 2 for a fit");
      require(wos.depth >= harnack.n + harnack.k_max + harnack.m,
              "wos.depth must be >= n + k_max + m");
      break;
    case ExperimentKind::Delta:
      require(delta.j >= 0 && delta.k_max >= 1, "delta needs j >= 0, k_max >= 1");
      require(wos.depth >= delta.j + delta.k_max, "wos.depth must be >= j + k_max");
      break;
    case ExperimentKind::OracleCompare:
      oracle_params().validate(seq);
      break;
  }
}

json ExperimentConfig::to_json() const {
  json j = json::object();
  for (const ConfigKey& key : config_keys()) {
    j[key.section][key.name] = key.get(*this);
  }
  return j;
}

ExperimentConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("config parse error: ") + e.what());
  }
  ExperimentConfig config;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "config key '" + section + "' must sit inside a [section]");
    }
    for (const auto& [name, value] : entries) {
      const auto& keys = config_keys();
      const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) {
        return section == k.section && name == k.name;
      });
      if (it == keys.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown config key '" + section + "." + name + "'");
      }
      it->set(config, value.data());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_reference() {
  const ExperimentConfig defaults;
  std::ostringstream out;
  out << "# hcantor experiment configuration. Every key is optional; the\n"
         "# values below are the defaults. Lines starting with # or ; are\n"
         "# comments.\n";
  std::string section;
  for (const ConfigKey& key : config_keys()) {
    if (section != key.section) {
      section = key.section;
      out << "\n[" << section << "]\n";
    }
    out << "# " << key.help << "\n" << key.name << " = " << key.get(defaults) << "\n";
  }
  return out.str();
}

json entropy_report_json(const EntropyReport& r) {
  return {{"depth", r.depth},
          {"n_effective", r.n_effective},
          {"exact", r.exact},
          {"plugin_entropy", r.plugin_entropy},
          {"miller_madow", r.miller_madow},
          {"entropy", r.entropy},
          {"occupied", r.occupied},
          {"lyapunov", r.lyapunov},
          {"ratio", r.ratio},
          {"capacity_bound", r.capacity_bound},
          {"estimate", metric(r.estimate, r.sigma)},
          {"sigma_bootstrap", r.sigma_bootstrap},
          {"sigma_spread", r.sigma_spread}};
}

std::string entropy_report_csv(const EntropyReport& r) {
  std::ostringstream out;
  out << "n,plugin_entropy,miller_madow,entropy,occupied,lyapunov,d_n,capacity_bound\n";
  for (std::size_t i = 0; i < r.ratio.size(); ++i) {
    out << i + 1 << "," << fmt17(r.plugin_entropy[i]) << ","
        << fmt17(r.miller_madow[i]) << "," << fmt17(r.entropy[i]) << ","
        << r.occupied[i] << "," << fmt17(r.lyapunov[i]) << ","
        << fmt17(r.ratio[i]) << "," << fmt17(r.capacity_bound[i]) << "\n";
  }
  return out.str();
}

ExperimentResult run_sample(const ExperimentConfig& config) {
  config.validate(ExperimentKind::Sample);
  const auto t0 = Clock::now();
  const ScaleSequence seq = config.sequence.build();
  Campaign c = campaign(config, seq, config.campaign.seed);
  ExperimentResult result{ExperimentKind::Sample,
                          base_result(ExperimentKind::Sample, config), {}};
  json& m = result.json["metrics"];
  m["campaign"] = c.stats;
  json probs = json::object();
  const int shown = std::min(c.table.depth(), 2);
  for (int g = 1; g <= shown; ++g) {
    for (const CylinderAddress& a : generation_addresses(g)) {
      const Estimate e = probability(c.table, a);
      probs[a.to_string()] = metric_ci(e.value, e.interval);
    }
  }
  m["probabilities"] = probs;
  std::ostringstream csv;
  c.table.write_csv(csv);
  result.side_tables.emplace_back("table.csv", csv.str());
  finish_timing(result.json, t0, config.campaign.walkers);
  return result;
}

ExperimentResult run_dims(const ExperimentConfig& base_config,
                          const OptionalTable& given) {
  const ExperimentConfig config = effective_config(base_config, given);
  config.validate(ExperimentKind::Dims);
  const auto t0 = Clock::now();
  const ScaleSequence seq = config.sequence.build();
  ExperimentResult result{ExperimentKind::Dims,
                          base_result(ExperimentKind::Dims, config), {}};
  json& m = result.json["metrics"];
  std::uint64_t walkers_run = 0;
  Campaign c = obtain_table(config, seq, given, walkers_run);
  m["campaign"] = c.stats;
  const EntropyReport report =
      entropy_ratio_dimension(c.table, seq, entropy_options(config));
  m["entropy"] = entropy_report_json(report);
  m["dimension"] = metric(report.estimate, report.sigma);
  const LocalDimensionSummary local = local_dimension_samples(
      c.table, seq, config.statistics.local_dimension_samples,
      derive_seed(config.statistics.bootstrap_seed, 7));
  const double n_local = static_cast<double>(std::max<std::size_t>(1, local.samples.size()));
  m["local_dimension"] = {{"mean", metric(local.mean, local.stddev / std::sqrt(n_local))},
                          {"stddev", local.stddev},
                          {"q05", local.q05},
                          {"median", local.median},
                          {"q95", local.q95},
                          {"samples", local.samples.size()}};
  const double dim_k = dim_cantor(seq, config.gap.cantor_n_max);
  m["dim_cantor"] = metric(dim_k, 0.0);
  result.side_tables.emplace_back("dims.csv", entropy_report_csv(report));
  finish_timing(result.json, t0, walkers_run);
  return result;
}

ExperimentResult run_gap_test(const ExperimentConfig& base_config,
                              const OptionalTable& given) {
  const ExperimentConfig config = effective_config(base_config, given);
  config.validate(ExperimentKind::Gap);
  const auto t0 = Clock::now();
  const ScaleSequence seq = config.sequence.build();
  ExperimentResult result{ExperimentKind::Gap,
                          base_result(ExperimentKind::Gap, config), {}};
  json& m = result.json["metrics"];
  std::optional<CylinderMeasureTable> table;
  std::uint64_t walkers_run = 0;
  if (config.gap.synthetic_uniform) {
    table = CylinderMeasureTable::uniform(config.wos.depth);
    m["measure"] = "uniform";
  } else {
    Campaign c = obtain_table(config, seq, given, walkers_run);
    m["campaign"] = c.stats;
    m["measure"] = "harmonic";
    table = std::move(c.table);
  }
  const EntropyReport report =
      entropy_ratio_dimension(*table, seq, entropy_options(config));
  const double dim_k = dim_cantor(seq, config.gap.cantor_n_max);
  const double gap = dim_k - report.estimate;
  m["entropy"] = entropy_report_json(report);
  m["dimension"] = metric(report.estimate, report.sigma);
  m["dim_cantor"] = metric(dim_k, 0.0);
  m["gap"] = metric(gap, report.sigma);
  m["gap_in_sigma"] = report.sigma > 0.0 ? gap / report.sigma : 0.0;
  json& v = result.json["verdicts"];
  v["below_cantor_dimension_3sigma"] = report.estimate + 3.0 * report.sigma < dim_k;
  if (dim_k >= 1.0 - 1e-12) {
    v["below_one_3sigma"] = report.estimate + 3.0 * report.sigma < 1.0;
  }
  result.side_tables.emplace_back("dims.csv", entropy_report_csv(report));
  finish_timing(result.json, t0, walkers_run);
  return result;
}

ExperimentResult run_continuity_sweep(const ExperimentConfig& config) {
  config.validate(ExperimentKind::Continuity);
  const auto t0 = Clock::now();
  const ScaleSequence base = config.sequence.build();
  ExperimentResult result{ExperimentKind::Continuity,
                          base_result(ExperimentKind::Continuity, config), {}};
  json& m = result.json["metrics"];
  const EntropyOptions eo = entropy_options(config);
  const ScanOptions so = config.scan_options();
  std::uint64_t walkers_run = 0;

  Campaign base_run = campaign(config, base, config.campaign.seed);
  walkers_run += config.campaign.walkers;
  const EntropyReport base_report = entropy_ratio_dimension(base_run.table, base, eo);
  m["base"] = {{"campaign", base_run.stats},
               {"dimension", metric(base_report.estimate, base_report.sigma)},
               {"sigma_bootstrap", base_report.sigma_bootstrap},
               {"ratio", base_report.ratio}};

  struct Point {
    double delta;
    double diff;
    double sigma;       // full combined uncertainty
    double sigma_stat;  // bootstrap part only
  };
  std::vector<Point> points;
  json sweep = json::array();
  std::ostringstream csv;
  csv << "delta,dimension,dimension_sigma,difference,difference_sigma,"
         "difference_sigma_bootstrap,codim_max,codim_lo,codim_hi\n";

  std::vector<double> deltas = config.continuity.deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  if (config.continuity.control) deltas.push_back(0.0);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    const ScaleSequence seq =
        delta > 0.0 ? ScaleSequence::perturbation(base, delta, config.continuity.pattern)
                    : base;
    Campaign run = campaign(config, seq, derive_seed(config.campaign.seed, i + 1));
    walkers_run += config.campaign.walkers;
    const EntropyReport report = entropy_ratio_dimension(run.table, seq, eo);
    const double diff = std::abs(report.estimate - base_report.estimate);
    const Point p{delta, diff, std::hypot(report.sigma, base_report.sigma),
                  std::hypot(report.sigma_bootstrap, base_report.sigma_bootstrap)};
    points.push_back(p);
    const CodimComparison codim = codim_compare(base_run.table, run.table, so);
    sweep.push_back({{"delta", delta},
                     {"sequence", seq.describe()},
                     {"campaign", run.stats},
                     {"dimension", metric(report.estimate, report.sigma)},
                     {"difference", metric(diff, p.sigma)},
                     {"difference_sigma_bootstrap", p.sigma_stat},
                     {"codim", {{"value", codim.max_abs_deviation},
                                {"ci", {codim.confidence.lo, codim.confidence.hi}},
                                {"pairs_scanned", codim.pairs_scanned},
                                {"pairs_excluded", codim.pairs_excluded},
                                {"argmax", codim.argmax}}}});
    csv << fmt17(delta) << "," << fmt17(report.estimate) << ","
        << fmt17(report.sigma) << "," << fmt17(diff) << "," << fmt17(p.sigma)
        << "," << fmt17(p.sigma_stat) << "," << fmt17(codim.max_abs_deviation)
        << "," << fmt17(codim.confidence.lo) << ","
        << fmt17(codim.confidence.hi) << "\n";
  }
  m["sweep"] = sweep;
  m["pattern"] = std::string(to_string(config.continuity.pattern));

  // Verdicts over the positive deltas, largest first.
  json& v = result.json["verdicts"];
  std::vector<Point> positive;
  for (const Point& p : points) {
    if (p.delta > 0.0) positive.push_back(p);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < positive.size(); ++i) {
    const double slack =
        kZ95 * std::hypot(positive[i - 1].sigma, positive[i].sigma);
    if (positive[i].diff > positive[i - 1].diff + slack) monotone = false;
  }
  v["decreasing_within_ci"] = monotone;
  for (const Point& p : points) {
    if (p.delta == 0.0) v["control_consistent_with_zero"] = p.diff <= kZ95 * p.sigma;
  }
  // Lipschitz trend: the ratio difference/delta must not grow as delta
  // shrinks beyond what the largest-delta interval allows.
  if (!positive.empty()) {
    const Point& top = positive.front();
    const double bound = (top.diff + kZ95 * top.sigma) / top.delta;
    double worst_lower = 0.0;
    double ratio_max = 0.0;
    json ratios = json::array();
    for (const Point& p : positive) {
      const double lower = std::max(0.0, p.diff - kZ95 * p.sigma) / p.delta;
      const double upper = (p.diff + kZ95 * p.sigma) / p.delta;
      worst_lower = std::max(worst_lower, lower);
      ratio_max = std::max(ratio_max, p.diff / p.delta);
      ratios.push_back({{"delta", p.delta},
                        {"value", p.diff / p.delta},
                        {"ci", {lower, upper}}});
    }
    m["difference_over_delta"] = ratios;
    m["lipschitz_constant"] = {{"value", ratio_max}, {"ci", {worst_lower, bound}}};
    v["lipschitz_bounded"] = worst_lower <= bound;
  }
  result.side_tables.emplace_back("continuity.csv", csv.str());
  finish_timing(result.json, t0, walkers_run);
  return result;
}

ExperimentResult run_harnack_scan(const ExperimentConfig& base_config,
                                  const OptionalTable& given) {
  const ExperimentConfig config = effective_config(base_config, given);
  config.validate(ExperimentKind::Harnack);
  const auto t0 = Clock::now();
  const ScaleSequence seq = config.sequence.build();
  ExperimentResult result{ExperimentKind::Harnack,
                          base_result(ExperimentKind::Harnack, config), {}};
  json& m = result.json["metrics"];
  std::uint64_t walkers_run = 0;
  Campaign c = obtain_table(config, seq, given, walkers_run);
  m["campaign"] = c.stats;
  const auto& h = config.harnack;
  ScanOptions so = config.scan_options();

  std::vector<RatioScanReport> reports;
  std::vector<RatioScanReport> medians;
  json scans = json::array();
  std::ostringstream csv;
  csv << "k,max_abs_deviation,ci_lo,ci_hi,median_abs_deviation,pairs_scanned,"
         "pairs_excluded,argmax,c_tilde,c_tilde_lo,c_tilde_hi\n";
  for (int k = 1; k <= h.k_max; ++k) {
    RatioScanReport r = harnack_ratio_scan(c.table, h.n, k, h.m, so);
    const QuasiInvarianceReport qi = quasi_invariance_check(c.table, h.n, k, so);
    scans.push_back({{"k", k},
                     {"max_abs_deviation", metric_ci(r.max_abs_deviation, r.confidence)},
                     {"median_abs_deviation", r.median_abs_deviation},
                     {"pairs_scanned", r.pairs_scanned},
                     {"pairs_excluded", r.pairs_excluded},
                     {"argmax", r.argmax},
                     {"c_tilde", metric_ci(qi.max_ratio, qi.confidence)}});
    csv << k << "," << fmt17(r.max_abs_deviation) << "," << fmt17(r.confidence.lo)
        << "," << fmt17(r.confidence.hi) << "," << fmt17(r.median_abs_deviation)
        << "," << r.pairs_scanned << "," << r.pairs_excluded << "," << r.argmax
        << "," << fmt17(qi.max_ratio) << "," << fmt17(qi.confidence.lo) << ","
        << fmt17(qi.confidence.hi) << "\n";
    reports.push_back(r);
    RatioScanReport med = r;
    med.max_abs_deviation = r.median_abs_deviation;
    medians.push_back(med);
  }
  const DecayFit fit = fit_geometric_decay(reports);
  const DecayFit median_fit = fit_geometric_decay(medians);

  // Bootstrap interval for q_hat: refit on multinomial resamples.
  std::vector<double> q_samples;
  ScanOptions inner = so;
  inner.bootstrap_resamples = 0;
  for (int b = 0; b < config.statistics.bootstrap_resamples; ++b) {
    RngStream rng(derive_seed(config.statistics.bootstrap_seed, 0x4a),
                  static_cast<std::uint64_t>(b));
    const CylinderMeasureTable t = c.table.resample(rng);
    std::vector<RatioScanReport> rs;
    try {
      for (int k = 1; k <= h.k_max; ++k) {
        rs.push_back(harnack_ratio_scan(t, h.n, k, h.m, inner));
      }
      q_samples.push_back(fit_geometric_decay(rs).q_hat);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientCounts) throw;
    }
  }
  Interval q_ci{fit.q_hat, fit.q_hat};
  if (!q_samples.empty()) {
    std::sort(q_samples.begin(), q_samples.end());
    const std::size_t last = q_samples.size() - 1;
    q_ci = {q_samples[static_cast<std::size_t>(0.025 * last)],
            q_samples[static_cast<std::size_t>(0.975 * last)]};
  }
  m["scans"] = scans;
  m["fit"] = {{"q_hat", metric_ci(fit.q_hat, q_ci)},
              {"log_c", fit.log_c},
              {"r_squared", fit.r_squared},
              {"decaying", fit.decaying}};
  m["median_fit"] = {{"q_hat", median_fit.q_hat},
                     {"log_c", median_fit.log_c},
                     {"r_squared", median_fit.r_squared},
                     {"decaying", median_fit.decaying}};
  json& v = result.json["verdicts"];
  v["q_hat_below_one"] = fit.decaying && fit.q_hat < 1.0;
  v["fit_quality"] = fit.r_squared >= h.min_r_squared;
  result.side_tables.emplace_back("harnack.csv", csv.str());
  finish_timing(result.json, t0, walkers_run);
  return result;
}

ExperimentResult run_delta_decay(const ExperimentConfig& base_config,
                                 const OptionalTable& given) {
  const ExperimentConfig config = effective_config(base_config, given);
  config.validate(ExperimentKind::Delta);
  const auto t0 = Clock::now();
  const ScaleSequence seq = config.sequence.build();
  ExperimentResult result{ExperimentKind::Delta,
                          base_result(ExperimentKind::Delta, config), {}};
  json& m = result.json["metrics"];
  std::uint64_t walkers_run = 0;
  Campaign c = obtain_table(config, seq, given, walkers_run);
  m["campaign"] = c.stats;
  const int j = config.delta.j;
  const std::uint64_t floor = config.statistics.count_floor;
  const CylinderAddress root;

  std::vector<double> root_values;
  json rows = json::array();
  std::ostringstream csv;
  csv << "k,delta_root,ci_lo,ci_hi,max_generation1\n";
  for (int k = 1; k <= config.delta.k_max; ++k) {
    const OscillationValue value = delta_jk(c.table, root, j, k, floor);
    std::vector<double> boot;
    for (int b = 0; b < config.statistics.bootstrap_resamples; ++b) {
      RngStream rng(derive_seed(config.statistics.bootstrap_seed, 0xde),
                    static_cast<std::uint64_t>(b));
      try {
        boot.push_back(delta_jk(c.table.resample(rng), root, j, k, floor).delta);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientCounts) throw;
      }
    }
    Interval ci{value.delta, value.delta};
    if (!boot.empty()) {
      std::sort(boot.begin(), boot.end());
      const std::size_t last = boot.size() - 1;
      ci = {boot[static_cast<std::size_t>(0.025 * last)],
            boot[static_cast<std::size_t>(0.975 * last)]};
    }
    json row = {{"k", k},
                {"delta_root", metric_ci(value.delta, ci)},
                {"h_max", value.max_h},
                {"h_min", value.min_h},
                {"cells_used", value.cells_used},
                {"cells_excluded", value.cells_excluded}};
    double gen1_max = -1.0;
    if (1 + j + k <= c.table.depth()) {
      try {
        const OscillationReport rep = oscillation_report(c.table, 1, j, k, floor);
        json per_base = json::object();
        for (std::size_t i = 0; i < rep.bases.size(); ++i) {
          per_base[rep.bases[i]] = rep.values[i];
        }
        row["generation1"] = {{"values", per_base}, {"max", rep.max_value}};
        gen1_max = rep.max_value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientCounts) throw;
      }
    }
    rows.push_back(row);
    root_values.push_back(value.delta);
    csv << k << "," << fmt17(value.delta) << "," << fmt17(ci.lo) << ","
        << fmt17(ci.hi) << "," << fmt17(gen1_max) << "\n";
  }
  m["rows"] = rows;
  bool decreasing = true;
  for (std::size_t i = 1; i < root_values.size(); ++i) {
    if (!(root_values[i] < root_values[i - 1])) decreasing = false;
  }
  result.json["verdicts"]["root_decreasing"] = decreasing;
  result.side_tables.emplace_back("delta.csv", csv.str());
  finish_timing(result.json, t0, walkers_run);
  return result;
}

ExperimentResult run_oracle_compare(const ExperimentConfig& config) {
  config.validate(ExperimentKind::OracleCompare);
  const auto t0 = Clock::now();
  const ScaleSequence seq = config.sequence.build();
  ExperimentResult result{ExperimentKind::OracleCompare,
                          base_result(ExperimentKind::OracleCompare, config), {}};
  json& m = result.json["metrics"];
  Campaign c = campaign(config, seq, config.campaign.seed);
  const GridOracleParams op = config.oracle_params();
  const std::uint64_t oracle_seed = derive_seed(config.campaign.seed, 0x0c1e);
  const CylinderMeasureTable oracle =
      grid_harmonic_measure(seq, op, oracle_seed, config.campaign.workers);
  const ProbabilityDifference diff = max_probability_difference(c.table, oracle);

  // Bonferroni-adjusted 99% joint interval over all cells.
  const std::uint64_t cells = cells_in_generation(config.wos.depth);
  const boost::math::normal standard;
  const double z_joint = boost::math::quantile(
      standard, 1.0 - 0.01 / (2.0 * static_cast<double>(cells)));
  bool joint_ok = true;
  std::ostringstream csv;
  csv << "address,p_wos,wos_lo,wos_hi,p_oracle,oracle_lo,oracle_hi,difference,z\n";
  const auto& cw = c.table.generation_counts(config.wos.depth);
  const auto& co = oracle.generation_counts(config.wos.depth);
  const double nw = static_cast<double>(c.table.n_effective());
  const double no = static_cast<double>(oracle.n_effective());
  for (std::uint64_t cell = 0; cell < cells; ++cell) {
    const double pw = static_cast<double>(cw[cell]) / nw;
    const double po = static_cast<double>(co[cell]) / no;
    const double se = std::sqrt(pw * (1 - pw) / nw + po * (1 - po) / no);
    const double z = se > 0.0 ? (pw - po) / se : 0.0;
    if (std::abs(z) > z_joint) joint_ok = false;
    const Interval iw = wilson_interval(cw[cell], c.table.n_effective());
    const Interval io = wilson_interval(co[cell], oracle.n_effective());
    csv << CylinderAddress::from_code(cell, config.wos.depth).to_string() << ","
        << fmt17(pw) << "," << fmt17(iw.lo) << "," << fmt17(iw.hi) << ","
        << fmt17(po) << "," << fmt17(io.lo) << "," << fmt17(io.hi) << ","
        << fmt17(pw - po) << "," << fmt17(z) << "\n";
  }
  m["campaign"] = c.stats;
  m["oracle"] = json::parse(oracle.header_json());
  m["max_abs_difference"] = metric(diff.max_abs, diff.combined_se);
  m["argmax"] = diff.argmax;
  m["z_joint_99"] = z_joint;
  std::uint64_t walkers_run = config.campaign.walkers + config.oracle.walkers;
  if (config.oracle.richardson_walkers > 0) {
    GridOracleParams rp = op;
    rp.walkers = config.oracle.richardson_walkers;
    const RichardsonReport rr =
        richardson_check(seq, rp, oracle_seed, config.campaign.workers);
    m["richardson"] = {{"coarse_spacing", rr.coarse_spacing},
                       {"fine_spacing", rr.fine_spacing},
                       {"max_abs_difference",
                        metric(rr.difference.max_abs, rr.difference.combined_se)},
                       {"argmax", rr.difference.argmax}};
    walkers_run += 2 * config.oracle.richardson_walkers;
  }
  json& v = result.json["verdicts"];
  v["within_tolerance"] = diff.max_abs <= config.oracle.tolerance;
  v["joint_ci_99"] = joint_ok;
  result.side_tables.emplace_back("oracle.csv", csv.str());
  std::ostringstream oracle_csv;
  oracle.write_csv(oracle_csv);
  result.side_tables.emplace_back("oracle_table.csv", oracle_csv.str());
  finish_timing(result.json, t0, walkers_run);
  return result;
}

bool accepts_table(ExperimentKind kind) {
  return kind == ExperimentKind::Dims || kind == ExperimentKind::Gap ||
         kind == ExperimentKind::Harnack || kind == ExperimentKind::Delta;
}

ExperimentResult run_experiment(ExperimentKind kind,
                                const ExperimentConfig& config,
                                const OptionalTable& table) {
  require(!table || accepts_table(kind),
          std::string(to_string(kind)) + " does not accept an input table");
  switch (kind) {
    case ExperimentKind::Sample: return run_sample(config);
    case ExperimentKind::Dims: return run_dims(config, table);
    case ExperimentKind::Continuity: return run_continuity_sweep(config);
    case ExperimentKind::Gap: return run_gap_test(config, table);
    case ExperimentKind::Harnack: return run_harnack_scan(config, table);
    case ExperimentKind::Delta: return run_delta_decay(config, table);
    case ExperimentKind::OracleCompare: return run_oracle_compare(config);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment kind");
}

// ---------------------------------------------------------------- plots

namespace {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
  bool line = true;
  std::string colour = "#1f77b4";
};

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i] - e);
      y1 = std::max(y1, s.y[i] + e);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
      << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
      << H - B << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << H - B + 18
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(yv) + 4)
        << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << (T + H - B) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2
      << ")\">" << ylabel << "</text>\n";
  int legend = 0;
  for (const Series& s : series) {
    if (s.line && s.x.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << (i ? " " : "") << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
      }
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
          << "\" r=\"3\" fill=\"" << s.colour << "\"/>\n";
      if (i < s.err.size() && s.err[i] > 0.0) {
        out << "<line x1=\"" << fmt(px(s.x[i])) << "\" y1=\""
            << fmt(py(s.y[i] - s.err[i])) << "\" x2=\"" << fmt(px(s.x[i]))
            << "\" y2=\"" << fmt(py(s.y[i] + s.err[i])) << "\" stroke=\""
            << s.colour << "\"/>\n";
      }
    }
    out << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 14 * legend
        << "\" fill=\"" << s.colour << "\">" << s.name << "</text>\n";
    ++legend;
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<double> to_doubles(const json& arr) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(v.get<double>());
  return out;
}

std::string dn_plot(const json& entropy) {
  const std::vector<double> d = to_doubles(entropy.at("ratio"));
  const std::vector<double> cap = to_doubles(entropy.at("capacity_bound"));
  std::vector<double> n;
  for (std::size_t i = 0; i < d.size(); ++i) n.push_back(static_cast<double>(i + 1));
  return svg_plot("entropy-ratio dimension d_n", "generation n", "d_n",
                  {{"d_n", n, d, {}, true, "#1f77b4"},
                   {"n log4 / -log l(n)", n, cap, {}, true, "#d62728"}});
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_plots(const json& result) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string kind = result.at("kind").get<std::string>();
  const json& m = result.at("metrics");
  if (kind == "dims" || kind == "gap") {
    out.emplace_back("dn.svg", dn_plot(m.at("entropy")));
  } else if (kind == "continuity") {
    Series s{"|dim w - dim w'|", {}, {}, {}, false, "#1f77b4"};
    for (const auto& row : m.at("sweep")) {
      s.x.push_back(row.at("delta").get<double>());
      s.y.push_back(row.at("difference").at("value").get<double>());
      s.err.push_back(kZ95 * row.at("difference").at("sigma").get<double>());
    }
    out.emplace_back("continuity.svg",
                     svg_plot("dimension difference vs perturbation", "delta",
                              "|difference|", {s}));
  } else if (kind == "harnack") {
    Series pts{"log max deviation", {}, {}, {}, false, "#1f77b4"};
    Series med{"log median deviation", {}, {}, {}, false, "#2ca02c"};
    for (const auto& row : m.at("scans")) {
      const double k = row.at("k").get<double>();
      pts.x.push_back(k);
      pts.y.push_back(std::log(std::max(
          row.at("max_abs_deviation").at("value").get<double>(), 1e-300)));
      med.x.push_back(k);
      med.y.push_back(std::log(std::max(
          row.at("median_abs_deviation").get<double>(), 1e-300)));
    }
    Series fit{"fit log C + k log q", {}, {}, {}, true, "#d62728"};
    const double log_c = m.at("fit").at("log_c").get<double>();
    const double q = m.at("fit").at("q_hat").at("value").get<double>();
    for (double k : pts.x) {
      fit.x.push_back(k);
      fit.y.push_back(log_c + k * std::log(q));
    }
    out.emplace_back("harnack.svg",
                     svg_plot("cylinder ratio deviation decay", "offset k",
                              "log deviation", {pts, med, fit}));
  } else if (kind == "delta") {
    Series s{"Delta_j^k(root)", {}, {}, {}, true, "#1f77b4"};
    for (const auto& row : m.at("rows")) {
      s.x.push_back(row.at("k").get<double>());
      s.y.push_back(row.at("delta_root").at("value").get<double>());
    }
    out.emplace_back("delta.svg",
                     svg_plot("entropy oscillation", "k", "Delta", {s}));
  }
  return out;
}

std::vector<std::string> write_result(const ExperimentResult& result,
                                      const std::string& dir, bool plots) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << body;
    written.push_back(path);
  };
  write(std::string(to_string(result.kind)) + ".json", result.json.dump(2) + "\n");
  for (const auto& [name, body] : result.side_tables) write(name, body);
  if (plots) {
    for (const auto& [name, body] : render_plots(result.json)) write(name, body);
  }
  return written;
}

}  // namespace hcantor
