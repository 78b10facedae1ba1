#include "tdr/runio.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <Eigen/Core>
#include <filesystem>
#include <fstream>

namespace tdr {

RunDir::RunDir(const std::string& root, const std::string& subcommand,
               const WalkConfig& cfg, std::uint64_t seed)
    : subcommand_(subcommand), cfg_(&cfg), seed_(seed) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  path_ = root + "/" + subcommand + "-" + hash + "-" + std::to_string(seed);
  std::filesystem::create_directories(path_);
}

void RunDir::write_manifest(double wall_seconds) const {
  nlohmann::json j;
  j["subcommand"] = subcommand_;
  j["config"] = nlohmann::json::parse(config_to_json_text(*cfg_));
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(*cfg_)));
  j["config_hash"] = hash;
  j["seed"] = seed_;
  j["params"] = nlohmann::json::parse(params_json_);
  j["outputs"] = outputs_;
  j["versions"] = {{"tdrwalk", "0.1.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  j["wall_time_s"] = wall_seconds;
  j["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  std::ofstream out(path_ + "/manifest.json");
  out << j.dump(2) << "\n";
}

std::string resolve_output_root(const std::string& cli_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("TDRWALK_OUT"); env && *env) return env;
  return "runs";
}

}  // namespace tdr
