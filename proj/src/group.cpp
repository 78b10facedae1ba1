#include "tdr/group.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace tdr {

void WalkConfig::finalize() {
  if (dim < 2) throw ConfigError("dim must be >= 2");
  if (generators.empty()) throw ConfigError("no generators");
  if (probs.size() != generators.size())
    throw ConfigError("probs and generators sizes differ");
  double psum = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0) throw ConfigError("negative probability");
    psum += probs[i];
    drift += probs[i] * generators[i].chi;
    if (generators[i].entries.dim() != dim)
      throw ConfigError("generator dimension differs from dim");
  }
  if (std::abs(psum - 1.0) > 1e-12) throw ConfigError("probabilities do not sum to 1");
  if (std::abs(drift) > 1e-12) throw ConfigError("chi is not centered under probs");

  gen_d.clear();
  gen_inv_d.clear();
  chi.clear();
  cum_probs.clear();
  double acc = 0.0;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    gen_d.push_back(generators[i].entries.to_double());
    gen_inv_d.push_back(generators[i].entries.inverse_unimodular().to_double());
    chi.push_back(generators[i].chi);
    acc += probs[i];
    cum_probs.push_back(acc);
  }
  cum_probs.back() = 1.0;
}

bool WalkConfig::chi_integer_valued(double tol) const {
  for (const auto& g : generators)
    if (std::abs(g.chi - std::round(g.chi)) > tol) return false;
  return true;
}

double WalkConfig::max_abs_chi() const {
  double m = 0.0;
  for (const auto& g : generators) m = std::max(m, std::abs(g.chi));
  return m;
}

double WalkConfig::log_norm_bound() const {
  double m = 0.0;
  for (std::size_t i = 0; i < gen_d.size(); ++i) {
    m = std::max(m, gen_d[i].operatorNorm());
    m = std::max(m, gen_inv_d[i].operatorNorm());
  }
  return std::log(m);
}

WalkConfig reference_model() {
  WalkConfig cfg;
  cfg.dim = 2;
  cfg.name = "ref-sl2";
  const IntMatrix g0 = IntMatrix::from_rows({{1, 2}, {0, 1}});
  const IntMatrix g1 = IntMatrix::from_rows({{1, 0}, {2, 1}});
  cfg.generators.emplace_back(g0, 0.0);
  cfg.generators.emplace_back(g0.inverse_unimodular(), 0.0);
  cfg.generators.emplace_back(g1, 1.0);
  cfg.generators.emplace_back(g1.inverse_unimodular(), -1.0);
  cfg.probs = {0.25, 0.25, 0.25, 0.25};
  cfg.seed = 1;
  cfg.finalize();
  return cfg;
}

WalkConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  WalkConfig cfg;
  try {
    cfg.dim = j.at("dim").get<int>();
    const auto gens = j.at("generators");
    const auto chis = j.at("chi");
    if (gens.size() != chis.size())
      throw ConfigError("generators and chi sizes differ");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      auto rows = gens[i].get<std::vector<std::vector<long long>>>();
      cfg.generators.emplace_back(IntMatrix::from_rows(rows), chis[i].get<double>());
    }
    cfg.probs = j.at("probs").get<std::vector<double>>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.name = j.value("name", std::string{});
    cfg.assume_strongly_irreducible = j.value("assume_strongly_irreducible", true);
    cfg.assume_zariski_dense_sld = j.value("assume_zariski_dense_sld", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.finalize();
  return cfg;
}

WalkConfig load_config(const std::string& path_or_name) {
  if (path_or_name == "ref-sl2") return reference_model();
  std::ifstream in(path_or_name);
  if (!in) throw ConfigError("cannot open config file: " + path_or_name);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const WalkConfig& cfg) {
  nlohmann::json j;
  j["dim"] = cfg.dim;
  auto gens = nlohmann::json::array();
  auto chis = nlohmann::json::array();
  for (const auto& g : cfg.generators) {
    auto rows = nlohmann::json::array();
    for (int i = 0; i < cfg.dim; ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < cfg.dim; ++k)
        row.push_back(static_cast<long long>(g.entries.at(i, k)));
      rows.push_back(row);
    }
    gens.push_back(rows);
    chis.push_back(g.chi);
  }
  j["generators"] = gens;
  j["chi"] = chis;
  j["probs"] = cfg.probs;
  j["seed"] = cfg.seed;
  j["name"] = cfg.name;
  j["assume_strongly_irreducible"] = cfg.assume_strongly_irreducible;
  j["assume_zariski_dense_sld"] = cfg.assume_zariski_dense_sld;
  return j.dump(2);
}

std::uint64_t config_hash(const WalkConfig& cfg) {
  const std::string s = config_to_json_text(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
void check_letters(const Word& w, const WalkConfig& cfg) {
  for (int l : w.letters)
    if (l < 0 || l >= cfg.n_generators())
      throw PreconditionError("word letter out of range: " + std::to_string(l));
}
}  // namespace

GroupElement word_product(const Word& w, const WalkConfig& cfg) {
  if (w.empty()) throw PreconditionError("word_product of empty word");
  check_letters(w, cfg);
  GroupElement acc = cfg.generators[static_cast<std::size_t>(w.letters[0])];
  for (std::size_t i = 1; i < w.letters.size(); ++i)
    acc = compose(acc, cfg.generators[static_cast<std::size_t>(w.letters[i])]);
  return acc;
}

double chi_of_word(const Word& w, const WalkConfig& cfg) {
  check_letters(w, cfg);
  double s = 0.0;
  for (int l : w.letters) s += cfg.generators[static_cast<std::size_t>(l)].chi;
  return s;
}

}  // namespace tdr
