#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hcantor/hcantor.h"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  bool plots = false;
  std::string table_path;
};

int fail(hc_status status, const char* context) {
  std::fprintf(stderr, "hcantor: %s: %s (%s)\n", context, hc_last_error(),
               hc_status_name(status));
  return static_cast<int>(status);
}

int run(const std::string& kind, const Options& opt) {
  hc_config* config = nullptr;
  hc_status st = opt.config_path.empty()
                     ? hc_config_default(&config)
                     : hc_config_load(opt.config_path.c_str(), &config);
  if (st != HC_OK) return fail(st, "config");
  if (st == HC_OK && opt.seed) st = hc_config_set_seed(config, *opt.seed);
  if (st == HC_OK && opt.workers) st = hc_config_set_workers(config, *opt.workers);
  if (st == HC_OK && opt.out_dir) {
    st = hc_config_set_output_dir(config, opt.out_dir->c_str());
  }
  if (st == HC_OK && opt.plots) st = hc_config_set_plots(config, 1);
  if (st != HC_OK) {
    hc_config_destroy(config);
    return fail(st, "config");
  }
  char* result = nullptr;
  char* written = nullptr;
  st = hc_experiment_run(kind.c_str(), config,
                         opt.table_path.empty() ? nullptr : opt.table_path.c_str(),
                         &result, &written);
  hc_config_destroy(config);
  if (st != HC_OK) return fail(st, kind.c_str());
  std::fputs(result, stdout);
  std::fputs("\n", stdout);
  std::fputs(written, stderr);
  hc_string_free(result);
  hc_string_free(written);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic measure experiments on 4-corner Cantor sets"};
  app.require_subcommand(1);
  Options opt;

  const char* kinds[][2] = {
      {"sample", "run a walk-on-spheres campaign and write the cylinder table"},
      {"dims", "entropy-ratio dimension estimate"},
      {"continuity", "dimension difference under perturbed scale sequences"},
      {"gap", "harmonic measure dimension against the Cantor set dimension"},
      {"harnack", "geometric decay of cylinder-ratio deviations"},
      {"delta", "decay of the entropy oscillation Delta_j^k"},
      {"oracle-compare", "walk-on-spheres against the lattice-walk oracle"},
  };
  std::string chosen;
  for (const auto& [name, help] : kinds) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override campaign.seed");
    sub->add_option("--workers", opt.workers, "override campaign.workers")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out_dir, "override output.dir");
    sub->add_flag("--plots", opt.plots, "emit SVG plots");
    const std::string n = name;
    if (n == "dims" || n == "gap" || n == "harnack" || n == "delta") {
      sub->add_option("--table", opt.table_path,
                      "existing table CSV; skips the campaign")
          ->check(CLI::ExistingFile);
    }
    sub->callback([&chosen, name = std::string(name)] { chosen = name; });
  }
  app.add_subcommand("config-reference",
                     "print every configuration key with its default")
      ->callback([&chosen] { chosen = "config-reference"; });

  CLI11_PARSE(app, argc, argv);

  if (chosen == "config-reference") {
    char* text = nullptr;
    const hc_status st = hc_config_reference(&text);
    if (st != HC_OK) return fail(st, "config-reference");
    std::fputs(text, stdout);
    hc_string_free(text);
    return 0;
  }
  return run(chosen, opt);
}
