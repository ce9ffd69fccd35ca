#include "anonplan/epidemics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "anonplan/error.hpp"
#include "anonplan/format.hpp"
#include "anonplan/random.hpp"

namespace anonplan {

namespace {

constexpr std::uint64_t kDegreeStream = 1;
constexpr std::uint64_t kPairingStream = 2;
constexpr std::uint64_t kControlStream = 3;
constexpr int kPairTries = 200;
constexpr int kRestarts = 2000;

}  // namespace

void EpidemicInstance::validate() const {
  if (n == 0) throw Error("instance needs at least one node");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw Error("edge endpoint out of range");
    if (u == v) throw Error("self-loop on node " + std::to_string(u));
    if (!seen.insert(std::minmax(u, v)).second) throw Error("duplicate edge");
  }
  std::set<int> c;
  for (int id : controlled) {
    if (id < 0 || static_cast<std::size_t>(id) >= n) throw Error("controlled node out of range");
    if (!c.insert(id).second) throw Error("duplicate controlled node");
  }
  const auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in01(params.beta) || !in01(params.delta)) throw Error("beta and delta must lie in [0, 1]");
  if (!(params.gamma >= 0.0 && params.gamma < 1.0)) throw Error("discount must lie in [0, 1)");
}

std::vector<std::vector<int>> EpidemicInstance::neighbors() const {
  std::vector<std::vector<int>> nb(n);
  for (auto [u, v] : edges) {
    nb[static_cast<std::size_t>(u)].push_back(v);
    nb[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& list : nb) std::sort(list.begin(), list.end());
  return nb;
}

std::vector<int> EpidemicInstance::degrees() const {
  std::vector<int> d(n, 0);
  for (auto [u, v] : edges) {
    ++d[static_cast<std::size_t>(u)];
    ++d[static_cast<std::size_t>(v)];
  }
  return d;
}

double EpidemicInstance::mean_degree() const {
  return n ? 2.0 * static_cast<double>(edges.size()) / static_cast<double>(n) : 0.0;
}

double sis_infection_probability(const SisParameters& p, int infected, int vaccinated, int infected_neighbors) {
  if (vaccinated) return 0.0;
  if (infected) return 1.0 - p.delta;
  return 1.0 - std::pow(1.0 - p.beta, infected_neighbors);
}

EpidemicInstance random_graph(std::size_t n, int k_max, std::uint64_t seed) {
  if (n < 2) throw Error("random graph needs n >= 2");
  if (k_max < 1 || static_cast<std::size_t>(k_max) >= n) throw Error("k_max must lie in [1, n)");

  std::vector<double> cdf;
  double total = 0.0;
  for (int k = 1; k <= k_max; ++k) cdf.push_back(total += 1.0 / k);
  Rng rng = Rng::stream(seed, kDegreeStream);
  std::vector<int> degree(n);
  for (auto& d : degree) {
    const double u = rng.uniform() * total;
    d = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
    d = std::min(d, k_max);
  }
  int sum = 0;
  for (int d : degree) sum += d;
  if (sum % 2) {
    auto& d = degree[rng.below(n)];
    if (d < k_max)
      ++d;
    else if (d > 1)
      --d;
    else
      throw Error("degree sequence unrealizable");
  }

  Rng pairing = Rng::stream(seed, kPairingStream);
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    std::vector<int> stubs;
    for (std::size_t i = 0; i < n; ++i) stubs.insert(stubs.end(), static_cast<std::size_t>(degree[i]), static_cast<int>(i));
    std::set<std::pair<int, int>> edges;
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      stuck = true;
      for (int t = 0; t < kPairTries; ++t) {
        const std::size_t i = pairing.below(stubs.size());
        const std::size_t j = pairing.below(stubs.size());
        const int u = stubs[i];
        const int v = stubs[j];
        if (i == j || u == v || edges.count(std::minmax(u, v))) continue;
        edges.insert(std::minmax(u, v));
        const std::size_t hi = std::max(i, j);
        const std::size_t lo = std::min(i, j);
        stubs[hi] = stubs.back();
        stubs.pop_back();
        stubs[lo] = stubs.back();
        stubs.pop_back();
        stuck = false;
        break;
      }
    }
    if (stuck) continue;
    EpidemicInstance inst;
    inst.n = n;
    inst.edges.assign(edges.begin(), edges.end());
    inst.seed = seed;
    return inst;
  }
  throw Error("degree sequence unrealizable");
}

void select_controlled(EpidemicInstance& inst, std::size_t count) {
  if (count > inst.n) throw Error("more controlled nodes than nodes");
  std::vector<int> ids(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) ids[i] = static_cast<int>(i);
  Rng rng = Rng::stream(inst.seed, kControlStream);
  for (std::size_t i = 0; i < count; ++i) std::swap(ids[i], ids[i + rng.below(inst.n - i)]);
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  inst.controlled = std::move(ids);
}

FactoredModel build_sis_model(const EpidemicInstance& inst) {
  inst.validate();
  const std::size_t n = inst.n;
  FactoredModel m;
  m.discount = inst.params.gamma;
  for (std::size_t i = 0; i < n; ++i) m.state_vars.push_back(m.variables.add("x" + std::to_string(i), VarKind::state));
  std::vector<std::optional<VarId>> action(n);
  for (int c : inst.controlled) {
    const VarId a = m.variables.add("a" + std::to_string(c), VarKind::action);
    m.action_vars.push_back(a);
    action[static_cast<std::size_t>(c)] = a;
  }
  for (std::size_t i = 0; i < n; ++i)
    m.next_state_vars.push_back(m.variables.add("x" + std::to_string(i) + "'", VarKind::next_state));

  const auto nb = inst.neighbors();
  const SisParameters p = inst.params;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ProperVar> proper{{m.next_state_vars[i], 2}, {m.state_vars[i], 2}};
    if (action[i]) proper.push_back({*action[i], 2});
    std::vector<CountScope> counters;
    if (!nb[i].empty()) counters.emplace_back(std::vector<VarId>(nb[i].begin(), nb[i].end()));
    const bool controlled = action[i].has_value();
    m.cpds.push_back(MixedModeFactor::tabulate(
        std::move(proper), std::move(counters), [&](std::span<const int> pv, std::span<const int> k) {
          const int vaccinated = controlled ? pv[2] : 0;
          const double p1 = sis_infection_probability(p, pv[1], vaccinated, k.empty() ? 0 : k[0]);
          return pv[0] ? p1 : 1.0 - p1;
        }));
  }
  for (std::size_t i = 0; i < n; ++i)
    m.rewards.emplace_back(std::vector<ProperVar>{{m.state_vars[i], 2}}, std::vector<CountScope>{},
                           std::vector<double>{0.0, -p.lambda2});
  for (VarId a : m.action_vars)
    m.rewards.emplace_back(std::vector<ProperVar>{{a, 2}}, std::vector<CountScope>{},
                           std::vector<double>{0.0, -p.lambda1});
  m.validate();
  return m;
}

void write_instance(std::ostream& os, const EpidemicInstance& inst, const std::vector<std::string>& comments) {
  os << "anonplan-graph/1\n";
  for (const auto& c : comments) os << "# " << c << '\n';
  os << "n " << inst.n << '\n';
  os << "controlled";
  for (int c : inst.controlled) os << ' ' << c;
  os << '\n';
  const auto& p = inst.params;
  os << "params " << format_double(p.beta) << ' ' << format_double(p.delta) << ' ' << format_double(p.lambda1) << ' '
     << format_double(p.lambda2) << ' ' << format_double(p.gamma) << ' ' << inst.seed << '\n';
  for (auto [u, v] : inst.edges) os << "edge " << u << ' ' << v << '\n';
}

EpidemicInstance read_instance(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "anonplan-graph/1") throw Error("not an anonplan-graph/1 file");
  EpidemicInstance inst;
  bool have_n = false;
  bool have_params = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n") {
      ls >> inst.n;
      have_n = true;
    } else if (key == "controlled") {
      int id;
      while (ls >> id) inst.controlled.push_back(id);
      if (!ls.eof()) throw Error("malformed instance line: " + line);
      ls.clear();
    } else if (key == "params") {
      std::string b, d, l1, l2, g;
      ls >> b >> d >> l1 >> l2 >> g >> inst.seed;
      inst.params = {parse_double(b), parse_double(d), parse_double(l1), parse_double(l2), parse_double(g)};
      have_params = true;
    } else if (key == "edge") {
      int u, v;
      ls >> u >> v;
      inst.edges.emplace_back(std::min(u, v), std::max(u, v));
    } else {
      throw Error("unknown instance line: " + line);
    }
    if (ls.fail()) throw Error("malformed instance line: " + line);
  }
  if (!have_n || !have_params) throw Error("instance file missing n or params");
  std::sort(inst.edges.begin(), inst.edges.end());
  std::sort(inst.controlled.begin(), inst.controlled.end());
  inst.validate();
  return inst;
}

void save_instance(const std::filesystem::path& path, const EpidemicInstance& inst,
                   const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_instance(out, inst, comments);
}

EpidemicInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_instance(in);
}

}  // namespace anonplan
