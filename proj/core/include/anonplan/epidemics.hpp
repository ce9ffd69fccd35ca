#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "anonplan/fmmdp.hpp"

namespace anonplan {

struct SisParameters {
  double beta = 0.6;     ///< transmission probability per infected neighbor
  double delta = 0.3;    ///< recovery probability
  double lambda1 = 1.0;  ///< vaccination cost
  double lambda2 = 50.0; ///< infection cost
  double gamma = 0.95;   ///< discount
};

/// Undirected contact graph with a controlled node subset and SIS parameters.
struct EpidemicInstance {
  std::size_t n = 0;
  std::vector<std::pair<int, int>> edges;  ///< u < v, sorted
  std::vector<int> controlled;             ///< sorted
  SisParameters params;
  std::uint64_t seed = 0;

  /// Throws on self-loops, duplicate or out-of-range edges, bad controlled ids, or
  /// parameters outside [0, 1] (beta, delta) and [0, 1) (gamma).
  void validate() const;
  std::vector<std::vector<int>> neighbors() const;
  std::vector<int> degrees() const;
  double mean_degree() const;
};

/// P(x_i' = 1) given the node's state, its action and its number of infected neighbors.
double sis_infection_probability(const SisParameters& p, int infected, int vaccinated, int infected_neighbors);

/// Graph with per-node degrees drawn from P(k) proportional to 1/k on [1, k_max],
/// realized by configuration-model pairing that rejects self-loops and multi-edges.
/// Throws Error("degree sequence unrealizable") when the retry budget runs out.
EpidemicInstance random_graph(std::size_t n, int k_max, std::uint64_t seed);

/// Picks `count` controlled nodes uniformly without replacement from the seed.
void select_controlled(EpidemicInstance& inst, std::size_t count);

/// Variable ids: state x_i = i, action of the j-th controlled node = n + j,
/// next state x_i' = n + g + i.
FactoredModel build_sis_model(const EpidemicInstance& inst);

/// Instance text format. `comment` lines are written after the header, prefixed '#'.
void write_instance(std::ostream& os, const EpidemicInstance& inst, const std::vector<std::string>& comments = {});
EpidemicInstance read_instance(std::istream& is);
void save_instance(const std::filesystem::path& path, const EpidemicInstance& inst,
                   const std::vector<std::string>& comments = {});
EpidemicInstance load_instance(const std::filesystem::path& path);

}  // namespace anonplan
