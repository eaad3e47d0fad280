#include "hcantor/hcantor.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "hcantor/dim_entropy.hpp"
#include "hcantor/error.hpp"
#include "hcantor/experiments.hpp"
#include "hcantor/geometry.hpp"
#include "hcantor/measure_table.hpp"
#include "hcantor/oracle_grid.hpp"
#include "hcantor/wos.hpp"

struct hc_sequence {
  hcantor::ScaleSequence seq;
};

struct hc_table {
  hcantor::CylinderMeasureTable table;
};

struct hc_config {
  hcantor::ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error;

hc_status status_of(hcantor::ErrorCode code) {
  switch (code) {
    case hcantor::ErrorCode::InvalidArgument: return HC_ERR_INVALID_ARGUMENT;
    case hcantor::ErrorCode::StepLimitExceeded: return HC_ERR_STEP_LIMIT;
    case hcantor::ErrorCode::DiscardLimitExceeded: return HC_ERR_DISCARD_LIMIT;
    case hcantor::ErrorCode::UndefinedConditional:
      return HC_ERR_UNDEFINED_CONDITIONAL;
    case hcantor::ErrorCode::InsufficientCounts: return HC_ERR_INSUFFICIENT_COUNTS;
    case hcantor::ErrorCode::DepthMismatch: return HC_ERR_DEPTH_MISMATCH;
    case hcantor::ErrorCode::CostGuard: return HC_ERR_COST_GUARD;
    case hcantor::ErrorCode::Io: return HC_ERR_IO;
  }
  return HC_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes and the thread-local
// error message.
template <typename F>
hc_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return HC_OK;
  } catch (const hcantor::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HC_ERR_INVALID_ARGUMENT;
  } catch (...) {
    g_last_error = "unknown error";
    return HC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) {
    throw hcantor::Error(hcantor::ErrorCode::InvalidArgument,
                         std::string(what) + " must not be null");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

hcantor::WosParams to_params(const hc_wos_params& p) {
  hcantor::WosParams w;
  w.depth = p.depth;
  w.absorb_epsilon = p.absorb_epsilon;
  w.start_radius = p.start_radius;
  w.outer_radius = p.outer_radius;
  w.reentry_radius = p.reentry_radius;
  w.max_steps = p.max_steps;
  return w;
}

}  // namespace

extern "C" {

const char* hc_version(void) { return "1.0.0"; }

const char* hc_last_error(void) { return g_last_error.c_str(); }

const char* hc_status_name(hc_status status) {
  switch (status) {
    case HC_OK: return "ok";
    case HC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HC_ERR_STEP_LIMIT: return "step limit exceeded";
    case HC_ERR_DISCARD_LIMIT: return "discard limit exceeded";
    case HC_ERR_UNDEFINED_CONDITIONAL: return "undefined conditional";
    case HC_ERR_INSUFFICIENT_COUNTS: return "insufficient counts";
    case HC_ERR_DEPTH_MISMATCH: return "depth mismatch";
    case HC_ERR_COST_GUARD: return "cost guard";
    case HC_ERR_IO: return "i/o error";
    case HC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hc_string_free(char* s) { std::free(s); }

hc_status hc_sequence_create(hc_sequence_kind kind, const double* values,
                             size_t count, hc_sequence** out) {
  return guarded([&] {
    need(out, "out");
    need(values, "values");
    hcantor::require(count > 0, "a sequence needs at least one value");
    std::vector<double> v(values, values + count);
    std::optional<hcantor::ScaleSequence> seq;
    switch (kind) {
      case HC_SEQUENCE_CONSTANT:
        hcantor::require(count == 1, "a constant sequence takes one value");
        seq = hcantor::ScaleSequence::constant(v[0]);
        break;
      case HC_SEQUENCE_PERIODIC:
        seq = hcantor::ScaleSequence::periodic(std::move(v));
        break;
      case HC_SEQUENCE_EXPLICIT:
        seq = hcantor::ScaleSequence::explicit_prefix(std::move(v));
        break;
      default:
        throw hcantor::Error(hcantor::ErrorCode::InvalidArgument,
                             "unknown sequence kind");
    }
    *out = new hc_sequence{std::move(*seq)};
  });
}

hc_status hc_sequence_perturb(const hc_sequence* base, double delta,
                              hc_pattern pattern, hc_sequence** out) {
  return guarded([&] {
    need(base, "base");
    need(out, "out");
    const auto p = pattern == HC_PATTERN_CONSTANT_SIGN
                       ? hcantor::PerturbationPattern::ConstantSign
                       : hcantor::PerturbationPattern::Alternating;
    *out = new hc_sequence{
        hcantor::ScaleSequence::perturbation(base->seq, delta, p)};
  });
}

void hc_sequence_destroy(hc_sequence* seq) { delete seq; }

hc_status hc_sequence_ratio(const hc_sequence* seq, int n, double* out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    *out = seq->seq.ratio(n);
  });
}

hc_status hc_sequence_sidelength(const hc_sequence* seq, int n, double* out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    *out = seq->seq.sidelength(n);
  });
}

hc_status hc_sequence_fingerprint(const hc_sequence* seq, char** out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    *out = dup_string(seq->seq.fingerprint());
  });
}

hc_status hc_distance(const hc_sequence* seq, int depth, double x, double y,
                      double* out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    *out = hcantor::distance_to_approximation({x, y}, seq->seq, depth);
  });
}

hc_status hc_containing_cylinder(const hc_sequence* seq, int depth, double x,
                                 double y, char** out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    const auto addr = hcantor::containing_cylinder({x, y}, seq->seq, depth);
    *out = dup_string(addr ? addr->to_string() : std::string());
  });
}

hc_status hc_dim_cantor(const hc_sequence* seq, int n_max, int window,
                        double* out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    *out = hcantor::dim_cantor(seq->seq, n_max, window);
  });
}

hc_status hc_wos_defaults(const hc_sequence* seq, int depth, hc_wos_params* out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    const hcantor::WosParams p = hcantor::WosParams::defaults(seq->seq, depth);
    *out = hc_wos_params{p.depth,        p.absorb_epsilon, p.start_radius,
                         p.outer_radius, p.reentry_radius, p.max_steps};
  });
}

hc_status hc_campaign_run(const hc_sequence* seq, const hc_wos_params* params,
                          uint64_t walkers, uint64_t seed, unsigned workers,
                          hc_table** out) {
  return guarded([&] {
    need(seq, "seq");
    need(params, "params");
    need(out, "out");
    hcantor::WosParams p = to_params(*params);
    if (p.absorb_epsilon == 0.0) {
      p.absorb_epsilon =
          hcantor::WosParams::defaults(seq->seq, p.depth).absorb_epsilon;
    }
    *out = new hc_table{
        hcantor::run_campaign(seq->seq, p, walkers, seed, workers)};
  });
}

hc_status hc_oracle_run(const hc_sequence* seq, int depth, uint64_t walkers,
                        uint64_t seed, unsigned workers, hc_table** out) {
  return guarded([&] {
    need(seq, "seq");
    need(out, "out");
    hcantor::GridOracleParams p;
    p.depth = depth;
    p.walkers = walkers;
    *out = new hc_table{hcantor::grid_harmonic_measure(seq->seq, p, seed, workers)};
  });
}

hc_status hc_exterior_kernel_cdf(double phi, double rho, double* out) {
  return guarded([&] {
    need(out, "out");
    hcantor::require(rho > 1.0, "rho must exceed 1");
    *out = hcantor::exterior_kernel_cdf(phi, rho);
  });
}

hc_status hc_table_uniform(int depth, hc_table** out) {
  return guarded([&] {
    need(out, "out");
    *out = new hc_table{hcantor::CylinderMeasureTable::uniform(depth)};
  });
}

hc_status hc_table_load(const char* path, hc_table** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hc_table{hcantor::CylinderMeasureTable::load(path)};
  });
}

hc_status hc_table_save(const hc_table* table, const char* path) {
  return guarded([&] {
    need(table, "table");
    need(path, "path");
    table->table.save(path);
  });
}

void hc_table_destroy(hc_table* table) { delete table; }

hc_status hc_table_depth(const hc_table* table, int* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = table->table.depth();
  });
}

hc_status hc_table_n_effective(const hc_table* table, uint64_t* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = table->table.n_effective();
  });
}

hc_status hc_table_count(const hc_table* table, const char* word, uint64_t* out) {
  return guarded([&] {
    need(table, "table");
    need(word, "word");
    need(out, "out");
    *out = table->table.count(hcantor::CylinderAddress::parse(word));
  });
}

hc_status hc_table_probability(const hc_table* table, const char* word,
                               double* value, double* lo, double* hi) {
  return guarded([&] {
    need(table, "table");
    need(word, "word");
    need(value, "value");
    const hcantor::Estimate e =
        hcantor::probability(table->table, hcantor::CylinderAddress::parse(word));
    *value = e.value;
    if (lo) *lo = e.interval.lo;
    if (hi) *hi = e.interval.hi;
  });
}

hc_status hc_table_conditional(const hc_table* table, const char* base,
                               const char* tail, double* out) {
  return guarded([&] {
    need(table, "table");
    need(base, "base");
    need(tail, "tail");
    need(out, "out");
    *out = hcantor::conditional(table->table, hcantor::CylinderAddress::parse(base),
                                hcantor::CylinderAddress::parse(tail))
               .value;
  });
}

hc_status hc_entropy_hk(const hc_table* table, const char* base, int k,
                        double* out) {
  return guarded([&] {
    need(table, "table");
    need(base, "base");
    need(out, "out");
    *out = hcantor::entropy_hk(table->table, hcantor::CylinderAddress::parse(base), k);
  });
}

hc_status hc_delta_jk(const hc_table* table, const char* base, int j, int k,
                      double* out) {
  return guarded([&] {
    need(table, "table");
    need(base, "base");
    need(out, "out");
    *out = hcantor::delta_jk(table->table, hcantor::CylinderAddress::parse(base), j, k)
               .delta;
  });
}

hc_status hc_entropy_dimension(const hc_table* table, const hc_sequence* seq,
                               double* estimate, double* sigma) {
  return guarded([&] {
    need(table, "table");
    need(seq, "seq");
    need(estimate, "estimate");
    const hcantor::EntropyReport r =
        hcantor::entropy_ratio_dimension(table->table, seq->seq);
    *estimate = r.estimate;
    if (sigma) *sigma = r.sigma;
  });
}

hc_status hc_config_default(hc_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new hc_config{};
  });
}

hc_status hc_config_parse(const char* text, hc_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new hc_config{hcantor::parse_config(text)};
  });
}

hc_status hc_config_load(const char* path, hc_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hc_config{hcantor::load_config(path)};
  });
}

void hc_config_destroy(hc_config* config) { delete config; }

hc_status hc_config_set_seed(hc_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->config.campaign.seed = seed;
  });
}

hc_status hc_config_set_workers(hc_config* config, unsigned workers) {
  return guarded([&] {
    need(config, "config");
    hcantor::require(workers >= 1, "workers must be >= 1");
    config->config.campaign.workers = workers;
  });
}

hc_status hc_config_set_output_dir(hc_config* config, const char* dir) {
  return guarded([&] {
    need(config, "config");
    need(dir, "dir");
    config->config.output.dir = dir;
  });
}

hc_status hc_config_set_plots(hc_config* config, int plots) {
  return guarded([&] {
    need(config, "config");
    config->config.output.plots = plots != 0;
  });
}

hc_status hc_config_reference(char** out) {
  return guarded([&] {
    need(out, "out");
    *out = dup_string(hcantor::config_reference());
  });
}

hc_status hc_experiment_kind_valid(const char* kind) {
  return guarded([&] {
    need(kind, "kind");
    hcantor::parse_experiment_kind(kind);
  });
}

hc_status hc_experiment_run(const char* kind, const hc_config* config,
                            const char* table_path, char** result_json,
                            char** written_paths) {
  return guarded([&] {
    need(kind, "kind");
    need(config, "config");
    const hcantor::ExperimentKind k = hcantor::parse_experiment_kind(kind);
    const hcantor::ExperimentConfig& c = config->config;
    hcantor::OptionalTable table;
    if (table_path != nullptr) {
      table = hcantor::CylinderMeasureTable::load(table_path);
    }
    const hcantor::ExperimentResult result = hcantor::run_experiment(k, c, table);
    const std::vector<std::string> written =
        hcantor::write_result(result, c.output.dir, c.output.plots);
    if (result_json) *result_json = dup_string(result.json.dump(2));
    if (written_paths) *written_paths = dup_string(join_lines(written));
  });
}

hc_status hc_render_plots(const char* result_json, const char* dir,
                          char** written_paths) {
  return guarded([&] {
    need(result_json, "result_json");
    need(dir, "dir");
    namespace fs = std::filesystem;
    const nlohmann::json doc = nlohmann::json::parse(result_json);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw hcantor::Error(hcantor::ErrorCode::Io, "cannot create " + std::string(dir));
    std::vector<std::string> written;
    for (const auto& [name, body] : hcantor::render_plots(doc)) {
      const std::string path = (fs::path(dir) / name).string();
      std::ofstream out(path);
      if (!out) throw hcantor::Error(hcantor::ErrorCode::Io, "cannot write " + path);
      out << body;
      written.push_back(path);
    }
    if (written_paths) *written_paths = dup_string(join_lines(written));
  });
}

}  // extern "C"
