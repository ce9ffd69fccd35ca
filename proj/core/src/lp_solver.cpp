#include "anonplan/lp_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>

#include "anonplan/error.hpp"

namespace anonplan {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr std::int64_t kNone = -1;

struct Structure {
  std::vector<int> structural_index;  // per LP variable; -1 for auxiliaries
  std::vector<LpVar> structural;
  std::vector<std::int64_t> defines;  // per row: auxiliary bounded below by the row, or kNone
  std::vector<double> cost;           // objective over structural variables
  std::vector<double> tiebreak;       // secondary objective over structural variables
};

Structure analyze(const LinearProgramModel& lp) {
  const std::size_t n = lp.num_variables();
  const std::size_t rows = lp.num_constraints();
  std::vector<double> obj(n, 0.0);
  std::vector<double> second(n, 0.0);
  for (const auto& t : lp.objective().terms) obj[t.var] += t.coef;
  if (lp.tiebreak())
    for (const auto& t : lp.tiebreak()->terms) second[t.var] += t.coef;

  std::vector<char> aux(n, 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (const auto& t : lp.row(r).terms)
      if (t.coef > 0.0 && obj[t.var] == 0.0 && second[t.var] == 0.0) aux[t.var] = 1;

  Structure st;
  st.defines.assign(rows, kNone);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> last_def(n, 0);
    std::vector<std::size_t> first_use(n, std::numeric_limits<std::size_t>::max());
    std::vector<char> has_def(n, 0);
    for (std::size_t r = 0; r < rows && !changed; ++r) {
      std::int64_t d = kNone;
      int positives = 0;
      for (const auto& t : lp.row(r).terms) {
        if (!aux[t.var]) continue;
        if (t.coef > 0.0) {
          ++positives;
          d = t.var;
        } else {
          first_use[t.var] = std::min(first_use[t.var], r);
        }
      }
      if (positives > 1) {
        for (const auto& t : lp.row(r).terms)
          if (aux[t.var] && t.coef > 0.0) aux[t.var] = 0;
        changed = true;
      } else {
        st.defines[r] = d;
        if (d != kNone) {
          last_def[static_cast<std::size_t>(d)] = r;
          has_def[static_cast<std::size_t>(d)] = 1;
        }
      }
    }
    if (changed) continue;
    for (std::size_t v = 0; v < n; ++v)
      if (aux[v] && (!has_def[v] || first_use[v] < last_def[v])) {
        aux[v] = 0;
        changed = true;
      }
  }
  st.structural_index.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v)
    if (!aux[v]) {
      st.structural_index[v] = static_cast<int>(st.structural.size());
      st.structural.push_back(static_cast<LpVar>(v));
      st.cost.push_back(obj[v]);
      st.tiebreak.push_back(second[v]);
    }
  for (auto& d : st.defines)
    if (d != kNone && !aux[static_cast<std::size_t>(d)]) d = kNone;
  return st;
}

struct Violation {
  double amount;
  std::size_t row;
};

/// Evaluates auxiliaries at their least feasible values and scans the other rows.
class Oracle {
 public:
  Oracle(const LinearProgramModel& lp, const Structure& st, double cut_tol)
      : lp_(lp), st_(st), x_(lp.num_variables(), 0.0), arg_(lp.num_variables(), kNone), tol_(cut_tol) {}

  std::span<const double> values() const { return x_; }

  void forward(const Eigen::VectorXd& w, std::vector<Violation>& violated) {
    violated.clear();
    for (std::size_t s = 0; s < st_.structural.size(); ++s) x_[st_.structural[s]] = w[static_cast<Eigen::Index>(s)];
    for (std::size_t v = 0; v < x_.size(); ++v)
      if (st_.structural_index[v] < 0) {
        x_[v] = -std::numeric_limits<double>::infinity();
        arg_[v] = kNone;
      }
    for (std::size_t r = 0; r < lp_.num_constraints(); ++r) {
      const RowView row = lp_.row(r);
      const std::int64_t d = st_.defines[r];
      if (d != kNone) {
        double rest = 0.0;
        double own = 0.0;
        for (const auto& t : row.terms) {
          if (t.var == static_cast<LpVar>(d))
            own = t.coef;
          else
            rest += t.coef * x_[t.var];
        }
        const double value = (row.bound - rest) / own;
        auto& slot = x_[static_cast<std::size_t>(d)];
        if (value > slot) {
          slot = value;
          arg_[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(r);
        }
        continue;
      }
      double lhs = 0.0;
      double scale = std::max(1.0, std::abs(row.bound));
      for (const auto& t : row.terms) {
        lhs += t.coef * x_[t.var];
        scale = std::max(scale, std::abs(t.coef * x_[t.var]));
      }
      const double amount = row.bound - lhs;
      if (amount > tol_ * scale) violated.push_back({amount, r});
    }
  }

  /// Linearizes the violation of `root` along the active definitions: the cut is
  /// constant + coef . w <= 0.
  void expand(std::size_t root, Eigen::VectorXd& coef, double& constant) const {
    coef.setZero(static_cast<Eigen::Index>(st_.structural.size()));
    constant = 0.0;
    std::unordered_map<LpVar, double> mult;
    std::priority_queue<std::pair<std::int64_t, LpVar>> pending;
    auto accumulate = [&](std::size_t r, double scale, std::int64_t skip) {
      const RowView row = lp_.row(r);
      constant += scale * row.bound;
      for (const auto& t : row.terms) {
        if (static_cast<std::int64_t>(t.var) == skip) continue;
        const int s = st_.structural_index[t.var];
        if (s >= 0) {
          coef[s] -= scale * t.coef;
        } else {
          auto [it, fresh] = mult.try_emplace(t.var, 0.0);
          it->second -= scale * t.coef;
          if (fresh) pending.emplace(arg_[t.var], t.var);
        }
      }
    };
    accumulate(root, 1.0, kNone);
    while (!pending.empty()) {
      const auto [r, u] = pending.top();
      pending.pop();
      const RowView row = lp_.row(static_cast<std::size_t>(r));
      double own = 0.0;
      for (const auto& t : row.terms)
        if (t.var == u) own = t.coef;
      accumulate(static_cast<std::size_t>(r), mult[u] / own, u);
    }
  }

 private:
  const LinearProgramModel& lp_;
  const Structure& st_;
  std::vector<double> x_;
  std::vector<std::int64_t> arg_;
  double tol_;
};

/// Restricted master in dual form: max h.y s.t. G y = c, y >= 0.
/// Columns 2i and 2i+1 are the box cuts w_i >= -M and -w_i >= -M.
class Master {
 public:
  enum class Outcome { optimal, unbounded, pivot_limit };

  Master(const std::vector<double>& cost, double box) : k_(cost.size()), box_(box) {
    c_ = Eigen::Map<const Eigen::VectorXd>(cost.data(), static_cast<Eigen::Index>(k_));
    for (std::size_t i = 0; i < k_; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_));
      e[static_cast<Eigen::Index>(i)] = 1.0;
      add_column(e, -box);
      add_column(-e, -box);
    }
    basis_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      basis_[i] = cost[i] >= 0.0 ? 2 * i : 2 * i + 1;
      in_basis_[basis_[i]] = 1;
    }
    refactor();
  }

  void add_column(const Eigen::VectorXd& g, double h) {
    cols_.push_back(g);
    h_.push_back(h);
    in_basis_.push_back(0);
  }

  std::size_t columns() const { return cols_.size(); }
  /// Columns after the 2k box columns.
  std::size_t cut_count() const { return cols_.size() - 2 * k_; }
  const Eigen::VectorXd& cut(std::size_t i) const { return cols_[2 * k_ + i]; }
  double cut_bound(std::size_t i) const { return h_[2 * k_ + i]; }
  const Eigen::VectorXd& pi() const { return pi_; }
  double box() const { return box_; }

  bool box_active() const {
    for (std::size_t i = 0; i < k_; ++i)
      if (basis_[i] < 2 * k_ && x_[static_cast<Eigen::Index>(i)] > 1e-12 * (1.0 + c_.cwiseAbs().maxCoeff())) return true;
    return false;
  }

  void set_box(double box) {
    box_ = box;
    for (std::size_t j = 0; j < 2 * k_; ++j) h_[j] = -box;
    update_pi();
  }

  Outcome optimize(std::size_t& pivots, std::size_t max_pivots) {
    std::size_t degenerate_run = 0;
    update_pi();
    while (true) {
      if (pivots >= max_pivots) return Outcome::pivot_limit;
      const bool bland = degenerate_run > 50;
      std::size_t q = cols_.size();
      double best = 0.0;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (in_basis_[j]) continue;
        const double d = h_[j] - cols_[j].dot(pi_);
        if (d <= 1e-11 * (1.0 + std::abs(h_[j]))) continue;
        if (bland) {
          q = j;
          break;
        }
        if (d > best) {
          best = d;
          q = j;
        }
      }
      if (q == cols_.size()) return Outcome::optimal;

      const Eigen::VectorXd alpha = binv_ * cols_[q];
      std::size_t p = k_;
      double theta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k_; ++i) {
        const double a = alpha[static_cast<Eigen::Index>(i)];
        if (a <= 1e-9) continue;
        const double ratio = std::max(0.0, x_[static_cast<Eigen::Index>(i)]) / a;
        if (p == k_ || ratio < theta - 1e-12) {
          p = i;
          theta = ratio;
        } else if (ratio <= theta + 1e-12) {
          const bool better = bland ? basis_[i] < basis_[p] : a > alpha[static_cast<Eigen::Index>(p)];
          if (better) {
            p = i;
            theta = std::min(theta, ratio);
          }
        }
      }
      if (p == k_) return Outcome::unbounded;

      pivot(p, q, alpha);
      ++pivots;
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
      if (++since_refactor_ >= 64) refactor();
      update_pi();
    }
  }

 private:
  void pivot(std::size_t p, std::size_t q, const Eigen::VectorXd& alpha) {
    const auto P = static_cast<Eigen::Index>(p);
    const double ap = alpha[P];
    binv_.row(P) /= ap;
    x_[P] /= ap;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k_); ++i) {
      if (i == P || alpha[i] == 0.0) continue;
      binv_.row(i) -= alpha[i] * binv_.row(P);
      x_[i] -= alpha[i] * x_[P];
    }
    in_basis_[basis_[p]] = 0;
    basis_[p] = q;
    in_basis_[q] = 1;
  }

  void refactor() {
    const auto k = static_cast<Eigen::Index>(k_);
    Eigen::MatrixXd b(k, k);
    for (std::size_t i = 0; i < k_; ++i) b.col(static_cast<Eigen::Index>(i)) = cols_[basis_[i]];
    binv_ = b.partialPivLu().inverse();
    x_ = binv_ * c_;
    for (Eigen::Index i = 0; i < k; ++i)
      if (x_[i] < 0.0 && x_[i] > -1e-9) x_[i] = 0.0;
    since_refactor_ = 0;
  }

  void update_pi() {
    Eigen::VectorXd hb(static_cast<Eigen::Index>(k_));
    for (std::size_t i = 0; i < k_; ++i) hb[static_cast<Eigen::Index>(i)] = h_[basis_[i]];
    pi_ = binv_.transpose() * hb;
  }

  std::size_t k_;
  double box_;
  Eigen::VectorXd c_;
  std::vector<Eigen::VectorXd> cols_;
  std::vector<double> h_;
  std::vector<char> in_basis_;
  std::vector<std::size_t> basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_;
  Eigen::VectorXd pi_;
  std::size_t since_refactor_ = 0;
};

}  // namespace

SolverResult ReferenceSolver::solve(const LinearProgramModel& lp) const {
  const auto start = std::chrono::steady_clock::now();
  lp.validate();
  const Structure st = analyze(lp);
  const std::size_t k = st.structural.size();

  SolverResult result;
  Oracle oracle(lp, st, options_.cut_tol);
  std::vector<Violation> violated;
  auto finish = [&](LpStatus status, const Eigen::VectorXd& w) {
    oracle.forward(w, violated);
    result.status = status;
    result.values.assign(oracle.values().begin(), oracle.values().end());
    for (auto& v : result.values)
      if (!std::isfinite(v)) v = 0.0;
    result.objective = lp.objective().evaluate(result.values);
    result.max_violation = lp.max_violation(result.values);
    for (std::size_t v = 0; v < lp.num_variables(); ++v)
      if (lp.variable(static_cast<LpVar>(v)).kind == LpVarKind::weight) result.weights.push_back(result.values[v]);
    if (status == LpStatus::optimal && result.max_violation > options_.feasibility_tol)
      result.status = LpStatus::iteration_limit;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  if (k == 0) {
    const Eigen::VectorXd w;
    oracle.forward(w, violated);
    return finish(violated.empty() ? LpStatus::optimal : LpStatus::infeasible, w);
  }

  Eigen::VectorXd coef;
  double constant = 0.0;
  // Row generation until the master optimum satisfies every row. Returns nullopt on
  // success, else the terminal status.
  auto run = [&](Master& master) -> std::optional<LpStatus> {
    bool added = false;
    while (result.rounds < options_.max_rounds) {
      ++result.rounds;
      const std::size_t pivots_before = result.pivots;
      const Master::Outcome outcome = master.optimize(result.pivots, options_.max_pivots);
      if (outcome == Master::Outcome::unbounded) return LpStatus::infeasible;
      if (outcome == Master::Outcome::pivot_limit) return LpStatus::iteration_limit;

      oracle.forward(master.pi(), violated);
      // New cuts that price out below the master's tolerance cannot move it further.
      const bool stalled = added && result.pivots == pivots_before;
      if (violated.empty() || stalled) {
        if (!master.box_active()) return std::nullopt;
        if (master.box() >= options_.max_box) return LpStatus::unbounded;
        master.set_box(std::min(options_.max_box, master.box() * 10.0));
        added = false;
        continue;
      }
      const std::size_t take = std::min(violated.size(), std::max<std::size_t>(1, options_.cuts_per_round));
      std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take), violated.end(),
                        [](const Violation& a, const Violation& b) {
                          return a.amount > b.amount || (a.amount == b.amount && a.row < b.row);
                        });
      for (std::size_t i = 0; i < take; ++i) {
        oracle.expand(violated[i].row, coef, constant);
        master.add_column(-coef, constant);
        ++result.cuts;
      }
      added = true;
    }
    return LpStatus::iteration_limit;
  };

  Master master(st.cost, options_.initial_box);
  if (auto status = run(master)) return finish(*status, master.pi());
  if (!lp.tiebreak()) return finish(LpStatus::optimal, master.pi());

  // Minimize the tie-break objective over {cost . w <= optimum + slack}, reusing the cuts.
  const Eigen::Map<const Eigen::VectorXd> cost(st.cost.data(), static_cast<Eigen::Index>(k));
  const double optimum = cost.dot(master.pi());
  Master second(st.tiebreak, master.box());
  for (std::size_t i = 0; i < master.cut_count(); ++i) second.add_column(master.cut(i), master.cut_bound(i));
  second.add_column(-cost, -(optimum + options_.tiebreak_slack * std::max(1.0, std::abs(optimum))));
  if (auto status = run(second)) return finish(*status == LpStatus::unbounded ? LpStatus::optimal : *status, master.pi());
  return finish(LpStatus::optimal, second.pi());
}

SolverResult solve_lp(const LinearProgramModel& lp, const SolverOptions& options) {
  return ReferenceSolver(options).solve(lp);
}

}  // namespace anonplan
