#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tdr/exact.hpp"

namespace tdr {

// An element of the acting semigroup: an integer matrix of determinant one
// together with its translation value chi.  chi of a composed word is the
// sum of the chi of its letters.
struct GroupElement {
  IntMatrix entries;
  double chi = 0.0;

  GroupElement(IntMatrix m, double c) : entries(std::move(m)), chi(c) {
    if (entries.det() != 1) throw ConfigError("group element determinant is not 1");
  }
};

inline GroupElement compose(const GroupElement& g, const GroupElement& h) {
  return GroupElement(g.entries * h.entries, g.chi + h.chi);
}

inline GroupElement inverse(const GroupElement& g) {
  return GroupElement(g.entries.inverse_unimodular(), -g.chi);
}

// A word is a sequence of generator indices; letters[0] is applied first
// along a trajectory and is the leftmost factor in word_product.
struct Word {
  std::vector<int> letters;

  Word() = default;
  explicit Word(std::vector<int> l) : letters(std::move(l)) {}
  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
};

struct WalkConfig {
  int dim = 2;
  std::vector<GroupElement> generators;
  std::vector<double> probs;
  std::uint64_t seed = 0;
  std::string name;

  // User assertions, recorded only; nothing here can decide them.
  bool assume_strongly_irreducible = true;
  bool assume_zariski_dense_sld = true;

  // Derived caches filled by finalize(); hot loops index these directly.
  std::vector<Eigen::MatrixXd> gen_d;
  std::vector<Eigen::MatrixXd> gen_inv_d;
  std::vector<double> chi;
  std::vector<double> cum_probs;

  void finalize();  // validates invariants, fills caches; throws ConfigError

  int n_generators() const { return static_cast<int>(generators.size()); }
  bool chi_integer_valued(double tol = 1e-9) const;
  double max_abs_chi() const;
  // log sup over generators and their inverses of the operator norm
  double log_norm_bound() const;
};

// The built-in reference model "ref-sl2": the d=2 walk generated by
// [[1,2],[0,1]] and [[1,0],[2,1]] with their inverses, uniform probabilities
// and chi values (0,0,1,-1).
WalkConfig reference_model();

// Structured-text (JSON) config: keys dim, generators (integer row lists),
// probs, chi, seed; optional name and assumption flags.  The name "ref-sl2"
// is available without a file.
WalkConfig load_config(const std::string& path_or_name);
WalkConfig config_from_json_text(const std::string& text);

std::string config_to_json_text(const WalkConfig& cfg);

// Canonical 64-bit hash of the configuration (FNV-1a over the canonical
// JSON); used to name run directories.
std::uint64_t config_hash(const WalkConfig& cfg);

GroupElement word_product(const Word& w, const WalkConfig& cfg);  // pre: nonempty
double chi_of_word(const Word& w, const WalkConfig& cfg);

}  // namespace tdr
