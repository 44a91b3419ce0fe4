#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <iostream>

#include "fracseg/acceptance.hpp"

// Runs every acceptance criterion at reference resolution and the stated
// tolerances, printing one PASS/FAIL line per criterion.
TEST_CASE("acceptance suite") {
  fracseg::RunConfig cfg;
  cfg.mode = "suite";
  cfg.s = 0.5;
  cfg.resolution = fracseg::Resolution::reference;
  cfg.t_min = -6.0;
  cfg.t_max = 4.0;
  cfg.seed = 1234;
  const auto results = fracseg::run_acceptance(cfg, std::cout);
  REQUIRE(results.size() == 12);
  for (const auto& r : results) {
    INFO("criterion ", r.id, " (", r.name, "): ", r.detail);
    CHECK(r.pass);
  }
}
