#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdr/group.hpp"

namespace tdr {

// One directory per invocation, named by config hash and seed, holding the
// CSV/JSON outputs plus a manifest sufficient to re-run the experiment.
class RunDir {
 public:
  RunDir(const std::string& root, const std::string& subcommand, const WalkConfig& cfg,
         std::uint64_t seed);

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }
  void note_output(const std::string& name) { outputs_.push_back(name); }
  void set_params_json(const std::string& json_text) { params_json_ = json_text; }

  // writes manifest.json (config, hash, seed, params, outputs, wall time)
  void write_manifest(double wall_seconds) const;

 private:
  std::string path_;
  std::string subcommand_;
  const WalkConfig* cfg_;
  std::uint64_t seed_;
  std::vector<std::string> outputs_;
  std::string params_json_ = "{}";
};

// Output root: explicit argument, else the TDRWALK_OUT environment variable,
// else ./runs.
std::string resolve_output_root(const std::string& cli_value);

}  // namespace tdr
