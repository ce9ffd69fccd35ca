#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "anonplan/alp.hpp"
#include "anonplan/cli/artifacts.hpp"
#include "anonplan/cli/cli.hpp"
#include "anonplan/elimination.hpp"
#include "anonplan/epidemics.hpp"
#include "anonplan/error.hpp"
#include "anonplan/format.hpp"
#include "anonplan/lp_format.hpp"
#include "anonplan/model_io.hpp"
#include "anonplan/simulate.hpp"
#include "anonplan/statistics.hpp"
#include "anonplan/version.hpp"

namespace anonplan::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 26;

/// Thrown by commands to leave with a specific exit code after printing `what()`.
struct Exit : Error {
  int code;
  Exit(int c, const std::string& msg) : Error(msg), code(c) {}
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

std::string basis_label(const FactoredModel& m, const BasisFunction& b) {
  const VarId x = m.state_vars[static_cast<std::size_t>(b.id / 2)];
  return "I[" + m.variables[x].name + (b.id % 2 == 0 ? "=1]" : "=0]");
}

int solver_exit(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return kOk;
    case LpStatus::infeasible: return kAborted;
    default: return kSolverFailure;
  }
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::size_t nodes = 0;
  int k_max = 10;
  std::optional<std::size_t> controlled;
  std::uint64_t seed = 1;
  SisParameters params;
  fs::path out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (a.nodes < 2) throw Exit(kUsage, "--nodes must be at least 2");
  if (a.k_max < 1 || static_cast<std::size_t>(a.k_max) >= a.nodes)
    throw Exit(kUsage, "--k-max must be in [1, nodes)");
  const std::size_t controlled = a.controlled.value_or(a.nodes / 2);
  if (controlled > a.nodes) throw Exit(kUsage, "--controlled exceeds --nodes");

  EpidemicInstance inst;
  try {
    inst = random_graph(a.nodes, a.k_max, a.seed);
  } catch (const GuardExceeded&) {
    throw;
  } catch (const Error& e) {
    throw Exit(kAborted, std::string(e.what()) + " (choose another --seed)");
  }
  inst.params = a.params;
  select_controlled(inst, controlled);
  inst.validate();

  RunConfig cfg{"gen",
                {{"nodes", std::to_string(a.nodes)},
                 {"k-max", std::to_string(a.k_max)},
                 {"controlled", std::to_string(controlled)},
                 {"seed", std::to_string(a.seed)},
                 {"beta", format_double(a.params.beta)},
                 {"delta", format_double(a.params.delta)},
                 {"lambda1", format_double(a.params.lambda1)},
                 {"lambda2", format_double(a.params.lambda2)},
                 {"gamma", format_double(a.params.gamma)}}};
  auto os = open_out(a.out);
  write_instance(os, inst, {cfg.comment()});
  out << "wrote " << a.out.string() << ": n=" << inst.n << " edges=" << inst.edges.size()
      << " controlled=" << inst.controlled.size() << " mean_degree=" << std::fixed << std::setprecision(3)
      << inst.mean_degree() << '\n';
  return kOk;
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  fs::path instance;
  std::string method = "rr-alp";
  std::size_t max_entries = kDefaultMaxEntries;
  std::optional<fs::path> out;
  std::optional<fs::path> lp;
};

struct Solved {
  AlpProblem problem;
  AlpSolution solution;
};

EliminationLimits limits_for(AlpMethod method, std::size_t max_entries) {
  EliminationLimits lim;
  if (method != AlpMethod::rr) lim.max_entries = max_entries;
  return lim;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  AlpMethod method;
  try {
    method = alp_method_from_string(a.method);
  } catch (const Error& e) {
    throw Exit(kUsage, e.what());
  }
  const EpidemicInstance inst = load_instance(a.instance);
  const FactoredModel m = build_sis_model(inst);
  const auto basis = indicator_basis(m);
  const AlpProblem problem = build_alp(m, basis, method, limits_for(method, a.max_entries));
  const AlpSolution sol = solve_alp(problem, ReferenceSolver());

  RunConfig cfg{"solve",
                {{"instance", a.instance.string()},
                 {"method", to_string(method)},
                 {"max-entries", std::to_string(a.max_entries)},
                 {"gamma", format_double(inst.params.gamma)},
                 {"seed", std::to_string(inst.seed)}}};
  if (a.lp) export_lp(problem.lp, *a.lp, {cfg.comment()});

  WeightsFile w;
  w.method = to_string(method);
  w.status = to_string(sol.result.status);
  w.objective = sol.result.objective;
  w.constraints = problem.lp.num_constraints();
  w.auxiliaries = problem.lp.count(LpVarKind::auxiliary);
  for (const auto& b : basis) w.labels.push_back(basis_label(m, b));
  w.weights = sol.weights;
  w.ve_seconds = problem.generation_seconds;
  w.lp_seconds = sol.result.seconds;
  if (a.out) {
    auto os = open_out(*a.out);
    write_weights(os, w, cfg);
  }
  out << "method=" << w.method << " status=" << w.status << " objective=" << format_double(w.objective)
      << " constraints=" << w.constraints << " auxiliaries=" << w.auxiliaries << " ve_seconds=" << std::fixed
      << std::setprecision(3) << w.ve_seconds << " lp_seconds=" << w.lp_seconds << '\n';
  return solver_exit(sol.result.status);
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::vector<fs::path> instances;
  std::size_t max_entries = kDefaultMaxEntries;
  fs::path out;
};

struct BenchCell {
  bool ok = false;
  std::size_t constraints = 0;
  double ve = 0.0;
  double alp = 0.0;
};

BenchCell bench_one(const FactoredModel& m, std::span<const BasisFunction> basis, AlpMethod method,
                    std::size_t max_entries) {
  BenchCell c;
  try {
    const AlpProblem p = build_alp(m, basis, method, limits_for(method, max_entries));
    const AlpSolution s = solve_alp(p, ReferenceSolver());
    if (s.result.status != LpStatus::optimal) return c;
    c = {true, p.lp.num_constraints(), p.generation_seconds, s.result.seconds};
  } catch (const GuardExceeded&) {
  }
  return c;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.instances.empty()) throw Exit(kUsage, "bench needs at least one instance file");
  RunConfig cfg{"bench", {{"max-entries", std::to_string(a.max_entries)}}};
  std::string names;
  for (const auto& p : a.instances) names += (names.empty() ? "" : ",") + p.string();
  cfg.params["instances"] = names;

  auto os = open_out(a.out);
  os << "# " << cfg.comment() << '\n';
  const char* header = "graph_id,n,g,c_flat,c_rr,t_ve,t_rrve,t_alp,t_rralp,ratio_c,ratio_ve,ratio_alp";
  os << header << '\n';
  out << header << '\n';
  double sum[3] = {0, 0, 0};
  std::size_t rows = 0;
  for (const auto& path : a.instances) {
    const EpidemicInstance inst = load_instance(path);
    const FactoredModel m = build_sis_model(inst);
    const auto basis = indicator_basis(m);
    const BenchCell flat = bench_one(m, basis, AlpMethod::flat, a.max_entries);
    const BenchCell rr = bench_one(m, basis, AlpMethod::rr, a.max_entries);
    auto cell = [](const BenchCell& c, auto get) { return c.ok ? get(c) : std::string("n/a"); };
    std::ostringstream line;
    line << path.stem().string() << ',' << inst.n << ',' << inst.controlled.size() << ','
         << cell(flat, [](const BenchCell& c) { return std::to_string(c.constraints); }) << ','
         << cell(rr, [](const BenchCell& c) { return std::to_string(c.constraints); }) << ','
         << cell(flat, [](const BenchCell& c) { return fixed(c.ve, 4); }) << ','
         << cell(rr, [](const BenchCell& c) { return fixed(c.ve, 4); }) << ','
         << cell(flat, [](const BenchCell& c) { return fixed(c.alp, 4); }) << ','
         << cell(rr, [](const BenchCell& c) { return fixed(c.alp, 4); }) << ',';
    if (flat.ok && rr.ok) {
      const double r[3] = {static_cast<double>(rr.constraints) / static_cast<double>(flat.constraints),
                           flat.ve > 0 ? rr.ve / flat.ve : 0.0, flat.alp > 0 ? rr.alp / flat.alp : 0.0};
      line << fixed(r[0], 3) << ',' << fixed(r[1], 3) << ',' << fixed(r[2], 3);
      for (int i = 0; i < 3; ++i) sum[i] += r[i];
      ++rows;
    } else {
      line << "n/a,n/a,n/a";
    }
    os << line.str() << '\n';
    out << line.str() << '\n';
  }
  if (rows > 0) {
    const double n = static_cast<double>(rows);
    std::ostringstream avg;
    avg << "average,,,,,,,,," << fixed(sum[0] / n, 3) << ',' << fixed(sum[1] / n, 3) << ',' << fixed(sum[2] / n, 3);
    os << avg.str() << '\n';
    out << avg.str() << '\n';
  }
  out << "reference averages from the original experiments: ratio_c=0.53 ratio_ve=0.25 ratio_alp=0.16\n";
  return kOk;
}

// ---- sim -------------------------------------------------------------------

struct SimArgs {
  fs::path instance;
  std::optional<fs::path> weights;
  std::vector<std::string> policies;
  std::size_t starts = 50;
  std::size_t runs = 50;
  std::size_t horizon = 200;
  std::uint64_t seed = 1;
  bool undiscounted = false;
  fs::path out;
};

int cmd_sim(const SimArgs& a, std::ostream& out) {
  const EpidemicInstance inst = load_instance(a.instance);
  std::vector<std::string> policies = a.policies;
  if (policies.empty()) {
    policies = {"random", "copystate"};
    if (a.weights) policies.push_back("greedy");
  }

  RunConfig cfg{"sim",
                {{"instance", a.instance.string()},
                 {"weights", a.weights ? a.weights->string() : ""},
                 {"starts", std::to_string(a.starts)},
                 {"runs", std::to_string(a.runs)},
                 {"horizon", std::to_string(a.horizon)},
                 {"seed", std::to_string(a.seed)},
                 {"discounted", a.undiscounted ? "false" : "true"},
                 {"gamma", format_double(inst.params.gamma)}}};
  std::string joined;
  for (const auto& p : policies) joined += (joined.empty() ? "" : ",") + p;
  cfg.params["policies"] = joined;

  EvaluationConfig ec;
  ec.n_starts = a.starts;
  ec.n_runs = a.runs;
  ec.horizon = a.horizon;
  ec.seed = a.seed;
  ec.discounted = !a.undiscounted;
  if (ec.n_starts == 0 || ec.n_runs == 0) throw Exit(kUsage, "--starts and --runs must be positive");

  std::vector<PolicyEvaluation> evaluations;
  for (const auto& name : policies) {
    PolicyKind kind;
    try {
      kind = policy_kind_from_string(name);
    } catch (const Error& e) {
      throw Exit(kUsage, e.what());
    }
    std::unique_ptr<Policy> policy;
    switch (kind) {
      case PolicyKind::random: policy = std::make_unique<RandomPolicy>(inst); break;
      case PolicyKind::copystate: policy = std::make_unique<CopystatePolicy>(inst); break;
      case PolicyKind::greedy: {
        if (!a.weights) throw Exit(kUsage, "policy greedy requires --weights");
        const WeightsFile w = load_weights(*a.weights);
        const FactoredModel m = build_sis_model(inst);
        const auto basis = indicator_basis(m);
        if (w.weights.size() != basis.size())
          throw Error("weights file has " + std::to_string(w.weights.size()) + " weights, instance needs " +
                      std::to_string(basis.size()));
        policy = std::make_unique<GreedyPolicy>(inst, basis, w.weights);
        break;
      }
    }
    evaluations.push_back(evaluate(inst, *policy, ec));
  }

  std::vector<const PolicyEvaluation*> ptrs;
  for (const auto& e : evaluations) {
    const std::string stem = to_string(e.policy);
    {
      auto os = open_out(a.out / (stem + "_returns.csv"));
      os << "# " << cfg.comment() << '\n';
      write_returns_csv(os, e);
    }
    {
      auto os = open_out(a.out / (stem + "_summary.csv"));
      os << "# " << cfg.comment() << '\n';
      write_summary_csv(os, e);
    }
    const Interval ci = bootstrap_mean_ci(e.start_means, 0.95, 2000, a.seed);
    out << stem << ": grand_mean=" << fixed(e.grand_mean, 3) << " ci95=[" << fixed(ci.lo, 3) << ", "
        << fixed(ci.hi, 3) << "] median=" << fixed(e.over_starts.median, 3) << '\n';
    ptrs.push_back(&e);
  }
  auto os = open_out(a.out / "box.csv");
  os << "# " << cfg.comment() << '\n';
  write_box_csv(os, ptrs);
  return kOk;
}

// ---- ve --------------------------------------------------------------------

struct VeArgs {
  fs::path factors;
  bool greedy = false;
  std::optional<fs::path> out;
};

int cmd_ve(const VeArgs& a, std::ostream& out) {
  const FactorFile file = load_factor_file(a.factors);
  FactorSet fs(file.factors);
  EliminationOrder order;
  if (file.order && !a.greedy) {
    order = *file.order;
  } else {
    const auto vars = fs.variables();
    order = greedy_order(fs, vars);
  }
  EliminationStats stats;
  const ArgmaxResult r = eliminate_argmax(std::move(fs), order, &stats);

  Json assignment = Json::object();
  for (VarId v : order) assignment[file.variables[v].name] = r.assignment.at(v);
  Json ord = Json::array();
  for (VarId v : order) ord.push_back(file.variables[v].name);
  RunConfig cfg{"ve", {{"factors", a.factors.string()}, {"greedy", a.greedy ? "true" : "false"}}};
  Json doc{{"format", "anonplan-ve/1"},
           {"config", Json::parse(cfg.to_json())},
           {"value", r.value},
           {"order", ord},
           {"argmax", assignment},
           {"peak_augmented", stats.peak_augmented},
           {"peak_reduced", stats.peak_reduced},
           {"total_augmented", stats.total_augmented}};
  if (a.out) {
    auto os = open_out(*a.out);
    os << doc.dump(2) << '\n';
  }
  out << "max=" << format_double(r.value) << " peak_augmented=" << stats.peak_augmented << " order=";
  for (std::size_t i = 0; i < order.size(); ++i) out << (i ? "," : "") << file.variables[order[i]].name;
  out << '\n';
  return kOk;
}

// ---- inspect ---------------------------------------------------------------

struct InspectArgs {
  std::optional<fs::path> instance;
  std::optional<fs::path> factors;
  std::optional<fs::path> model_out;
};

void print_scope(std::ostream& out, const VariableTable& vars, const MixedModeFactor& f) {
  out << "proper:";
  for (const auto& p : f.proper()) out << ' ' << vars[p.id].name;
  out << " counters:";
  for (const auto& c : f.counters()) {
    out << " #(";
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << vars[c.members()[i]].name;
    out << ')';
  }
  out << " entries: " << f.size() << '\n';
}

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  if (a.instance.has_value() == a.factors.has_value())
    throw Exit(kUsage, "inspect needs exactly one of --instance or --factors");
  if (a.factors) {
    const FactorFile file = load_factor_file(*a.factors);
    for (std::size_t i = 0; i < file.factors.size(); ++i) {
      out << "factor " << i << ": ";
      print_scope(out, file.variables, file.factors[i]);
      dump(out, file.factors[i]);
    }
    return kOk;
  }
  const EpidemicInstance inst = load_instance(*a.instance);
  const FactoredModel m = build_sis_model(inst);
  out << "n=" << inst.n << " edges=" << inst.edges.size() << " controlled=" << inst.controlled.size()
      << " gamma=" << format_double(m.discount) << '\n';
  for (std::size_t i = 0; i < m.cpds.size(); ++i) {
    out << "cpd " << i << ": ";
    print_scope(out, m.variables, m.cpds[i]);
    dump(out, m.cpds[i]);
  }
  for (std::size_t i = 0; i < m.rewards.size(); ++i) {
    out << "reward " << i << ": ";
    print_scope(out, m.variables, m.rewards[i]);
    dump(out, m.rewards[i]);
  }
  if (a.model_out) {
    auto os = open_out(*a.model_out);
    write_model(os, m);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planning for factored MDPs with anonymous influence", "anonplan"};
  app.set_version_flag("--version", std::string("anonplan ") + kVersion);
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random SIS instance");
  g->add_option("--nodes", gen.nodes, "Number of nodes")->required();
  g->add_option("--k-max", gen.k_max, "Largest sampled degree")->capture_default_str();
  g->add_option("--controlled", gen.controlled, "Controlled nodes (default nodes/2)");
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--beta", gen.params.beta)->capture_default_str();
  g->add_option("--delta", gen.params.delta)->capture_default_str();
  g->add_option("--lambda1", gen.params.lambda1, "Vaccination cost")->capture_default_str();
  g->add_option("--lambda2", gen.params.lambda2, "Infection cost")->capture_default_str();
  g->add_option("--gamma", gen.params.gamma, "Discount")->capture_default_str();
  g->add_option("--out", gen.out, "Instance file")->required();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve the ALP of an instance with the indicator basis");
  s->add_option("--instance", solve.instance)->required()->check(CLI::ExistingFile);
  s->add_option("--method", solve.method, "exhaustive, alp or rr-alp")->capture_default_str();
  s->add_option("--max-entries", solve.max_entries, "Entry budget for flat and exhaustive tables")
      ->capture_default_str();
  s->add_option("--out", solve.out, "Weights file (JSON)");
  s->add_option("--lp", solve.lp, "Also export the LP in CPLEX LP format");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Compare flat and RR pipelines on instance files");
  b->add_option("instances", bench.instances)->required()->check(CLI::ExistingFile);
  b->add_option("--max-entries", bench.max_entries)->capture_default_str();
  b->add_option("--out", bench.out, "CSV file")->required();

  SimArgs sim;
  auto* m = app.add_subcommand("sim", "Monte Carlo policy evaluation");
  m->add_option("--instance", sim.instance)->required()->check(CLI::ExistingFile);
  m->add_option("--weights", sim.weights, "Weights file for the greedy policy")->check(CLI::ExistingFile);
  m->add_option("--policy", sim.policies, "random, copystate, greedy (repeatable)");
  m->add_option("--starts", sim.starts)->capture_default_str();
  m->add_option("--runs", sim.runs)->capture_default_str();
  m->add_option("--horizon", sim.horizon)->capture_default_str();
  m->add_option("--seed", sim.seed)->capture_default_str();
  m->add_flag("--undiscounted", sim.undiscounted, "Sum rewards without discounting");
  m->add_option("--out", sim.out, "Output directory")->required();

  VeArgs ve;
  auto* v = app.add_subcommand("ve", "Max-sum variable elimination on a factor file");
  v->add_option("--factors", ve.factors)->required()->check(CLI::ExistingFile);
  v->add_flag("--greedy", ve.greedy, "Ignore the file's order and use the greedy heuristic");
  v->add_option("--out", ve.out, "Result file (JSON)");

  InspectArgs inspect;
  auto* i = app.add_subcommand("inspect", "Print factors of an instance or factor file");
  i->add_option("--instance", inspect.instance)->check(CLI::ExistingFile);
  i->add_option("--factors", inspect.factors)->check(CLI::ExistingFile);
  i->add_option("--model-out", inspect.model_out, "Write the instance's model as JSON");

  std::vector<const char*> argv{"anonplan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*s) return cmd_solve(solve, out);
    if (*b) return cmd_bench(bench, out);
    if (*m) return cmd_sim(sim, out);
    if (*v) return cmd_ve(ve, out);
    if (*i) return cmd_inspect(inspect, out);
  } catch (const Exit& e) {
    err << "anonplan: " << e.what() << '\n';
    return e.code;
  } catch (const GuardExceeded& e) {
    err << "anonplan: " << e.what() << '\n';
    return kAborted;
  } catch (const Error& e) {
    err << "anonplan: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "anonplan: internal error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kUsage;
}

}  // namespace anonplan::cli
