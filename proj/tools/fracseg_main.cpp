#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fracseg/acceptance.hpp"
#include "fracseg/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fracseg: segregation profiles of the fractional competition system "
               "and their monotonicity/asymptotics diagnostics"};
  std::string config_path, mode, out_dir, resolution;
  long long seed = -1;
  app.add_option("--config", config_path, "key-value configuration file");
  app.add_option("--mode", mode,
                 "profile|spectrum|monotonicity|asymptotics|kernels|suite");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--resolution", resolution, "coarse|reference|fine");
  CLI11_PARSE(app, argc, argv);

  fracseg::RunConfig cfg;
  try {
    fracseg::KVConfig kv;
    if (!config_path.empty()) kv = fracseg::KVConfig::parse_file(config_path);
    if (!mode.empty()) kv.set("mode", mode);
    if (!out_dir.empty()) kv.set("out.dir", out_dir);
    if (seed >= 0) kv.set("seed", std::to_string(seed));
    if (!resolution.empty()) kv.set("resolution", resolution);
    cfg = fracseg::RunConfig::from_kv(kv);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    return fracseg::run_mode(cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    try {
      std::filesystem::create_directories(cfg.out_dir);
      nlohmann::ordered_json j;
      j["error"] = e.what();
      j["mode"] = cfg.mode;
      std::ofstream os(cfg.out_dir + "/error.json");
      os << j.dump(2) << "\n";
    } catch (...) {
    }
    return 3;
  }
}
