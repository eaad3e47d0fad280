#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "hcantor/hcantor.h"

TEST_CASE("sequences and geometry through the C interface") {
  const double a = 0.25;
  hc_sequence* seq = nullptr;
  REQUIRE(hc_sequence_create(HC_SEQUENCE_CONSTANT, &a, 1, &seq) == HC_OK);
  double v = 0.0;
  CHECK(hc_sequence_sidelength(seq, 2, &v) == HC_OK);
  CHECK(v == doctest::Approx(1.0 / 16));
  CHECK(hc_distance(seq, 1, 0.5, 0.5, &v) == HC_OK);
  CHECK(v == doctest::Approx(0.35355339059327373));
  char* word = nullptr;
  CHECK(hc_containing_cylinder(seq, 1, 0.01, 0.01, &word) == HC_OK);
  CHECK(std::string(word) == "1");
  hc_string_free(word);
  CHECK(hc_dim_cantor(seq, 20, 0, &v) == HC_OK);
  CHECK(v == doctest::Approx(1.0));
  hc_sequence* bad = nullptr;
  CHECK(hc_sequence_perturb(seq, 0.3, HC_PATTERN_ALTERNATING, &bad) ==
        HC_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(hc_last_error()) > 0);
  CHECK(hc_sequence_create(HC_SEQUENCE_CONSTANT, nullptr, 1, &bad) ==
        HC_ERR_INVALID_ARGUMENT);
  hc_sequence_destroy(seq);
}

TEST_CASE("campaign, table access and entropy through the C interface") {
  const double a = 1.0 / 3;
  hc_sequence* seq = nullptr;
  REQUIRE(hc_sequence_create(HC_SEQUENCE_CONSTANT, &a, 1, &seq) == HC_OK);
  hc_wos_params p;
  REQUIRE(hc_wos_defaults(seq, 3, &p) == HC_OK);
  hc_table* t = nullptr;
  REQUIRE(hc_campaign_run(seq, &p, 5000, 3, 2, &t) == HC_OK);
  uint64_t n = 0;
  CHECK(hc_table_n_effective(t, &n) == HC_OK);
  CHECK(n == 5000);
  double pr = 0.0, lo = 0.0, hi = 0.0;
  CHECK(hc_table_probability(t, "", &pr, &lo, &hi) == HC_OK);
  CHECK(pr == 1.0);
  CHECK(hc_table_probability(t, "1", &pr, &lo, &hi) == HC_OK);
  CHECK(lo <= pr);
  CHECK(pr <= hi);
  double h = 0.0;
  CHECK(hc_entropy_hk(t, "", 1, &h) == HC_OK);
  CHECK(h > 1.3);
  double est = 0.0, sigma = 0.0;
  CHECK(hc_entropy_dimension(t, seq, &est, &sigma) == HC_OK);
  CHECK(est < 1.26186);
  CHECK(hc_table_probability(t, "5", &pr, nullptr, nullptr) == HC_ERR_INVALID_ARGUMENT);

  const auto path = std::filesystem::temp_directory_path() / "hcantor_capi.csv";
  CHECK(hc_table_save(t, path.string().c_str()) == HC_OK);
  hc_table* loaded = nullptr;
  CHECK(hc_table_load(path.string().c_str(), &loaded) == HC_OK);
  uint64_t c1 = 0, c2 = 0;
  CHECK(hc_table_count(t, "213", &c1) == HC_OK);
  CHECK(hc_table_count(loaded, "213", &c2) == HC_OK);
  CHECK(c1 == c2);
  std::filesystem::remove(path);
  hc_table_destroy(loaded);
  hc_table_destroy(t);

  CHECK(hc_oracle_run(seq, 4, 10, 1, 1, &t) == HC_ERR_COST_GUARD);
  hc_sequence_destroy(seq);
}

TEST_CASE("experiments through the C interface") {
  char* ref = nullptr;
  REQUIRE(hc_config_reference(&ref) == HC_OK);
  hc_config* cfg = nullptr;
  REQUIRE(hc_config_parse(ref, &cfg) == HC_OK);
  hc_string_free(ref);
  const auto dir = std::filesystem::temp_directory_path() / "hcantor_capi_out";
  std::filesystem::remove_all(dir);
  CHECK(hc_config_set_output_dir(cfg, dir.string().c_str()) == HC_OK);
  CHECK(hc_config_set_seed(cfg, 11) == HC_OK);
  CHECK(hc_config_set_workers(cfg, 0) == HC_ERR_INVALID_ARGUMENT);
  hc_config_destroy(cfg);

  REQUIRE(hc_config_parse("[wos]\ndepth = 3\n[campaign]\nwalkers = 3000\n"
                          "[statistics]\nbootstrap_resamples = 10\n"
                          "local_dimension_samples = 100\n",
                          &cfg) == HC_OK);
  CHECK(hc_config_set_output_dir(cfg, dir.string().c_str()) == HC_OK);
  CHECK(hc_config_set_plots(cfg, 1) == HC_OK);
  char* json = nullptr;
  char* paths = nullptr;
  REQUIRE(hc_experiment_run("dims", cfg, nullptr, &json, &paths) == HC_OK);
  CHECK(std::string(json).find("\"dimension\"") != std::string::npos);
  CHECK(std::string(paths).find("dims.json") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "dn.svg"));
  const auto plots = dir / "replot";
  char* replotted = nullptr;
  CHECK(hc_render_plots(json, plots.string().c_str(), &replotted) == HC_OK);
  CHECK(std::string(replotted).find("dn.svg") != std::string::npos);
  hc_string_free(replotted);
  hc_string_free(json);
  hc_string_free(paths);
  CHECK(hc_experiment_run("harnack", cfg, nullptr, nullptr, nullptr) ==
        HC_ERR_INVALID_ARGUMENT);
  CHECK(hc_experiment_run("bogus", cfg, nullptr, nullptr, nullptr) ==
        HC_ERR_INVALID_ARGUMENT);
  CHECK(hc_experiment_kind_valid("oracle-compare") == HC_OK);
  hc_config_destroy(cfg);
  std::filesystem::remove_all(dir);
}
