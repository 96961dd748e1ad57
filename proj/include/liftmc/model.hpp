#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftmc/common.hpp"

namespace liftmc {

struct Variable {
  int id = -1;
  std::string name;
};

struct Literal {
  int var = -1;
  bool positive = true;
};

// A weighted clause: disjunction of literals, log-linear weight.
struct Clause {
  std::vector<Literal> literals;
  double weight = 0.0;
};

// A weighted-clause model over named Boolean variables. Immutable once
// built (construction via add_* only); ids are dense 0..n-1 in
// declaration order.
class Model {
 public:
  int add_variable(const std::string& name) {
    if (name.empty()) throw parse_error("empty variable name");
    if (name.find_first_of(" \t\r|!:#=") != std::string::npos)
      throw parse_error("invalid character in variable name '" + name + "'");
    if (ids_.count(name))
      throw parse_error("duplicate variable name '" + name + "'");
    int id = static_cast<int>(variables_.size());
    variables_.push_back(Variable{id, name});
    ids_.emplace(name, id);
    return id;
  }

  void add_clause(std::vector<Literal> literals, double weight) {
    if (!std::isfinite(weight)) throw parse_error("non-finite clause weight");
    if (literals.empty()) throw parse_error("clause with no literals");
    std::vector<char> seen(variables_.size(), 0);
    for (const Literal& l : literals) {
      if (l.var < 0 || l.var >= static_cast<int>(variables_.size()))
        throw parse_error("clause references unknown variable id");
      if (seen[l.var])
        throw parse_error("variable '" + variables_[l.var].name +
                          "' repeated within a clause");
      seen[l.var] = 1;
    }
    if (weight == 0.0) weight = 0.0;  // normalize -0
    clauses_.push_back(Clause{std::move(literals), weight});
  }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_clauses() const { return static_cast<int>(clauses_.size()); }
  const Variable& variable(int id) const { return variables_[id]; }
  const Clause& clause(int k) const { return clauses_[k]; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Clause>& clauses() const { return clauses_; }

  int find_variable(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
  }

  int require_variable(const std::string& name) const {
    int id = find_variable(name);
    if (id < 0) throw parse_error("unknown variable '" + name + "'");
    return id;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<Clause> clauses_;
  std::unordered_map<std::string, int> ids_;
};

// A full assignment to every variable of a model.
class State {
 public:
  State() = default;
  explicit State(int n, uint8_t fill = 0) : values_(n, fill) {}

  static State from_index(int n, uint64_t index) {
    State s(n);
    for (int i = 0; i < n; ++i) s.values_[i] = (index >> i) & 1u;
    return s;
  }

  uint64_t to_index() const {
    uint64_t idx = 0;
    for (size_t i = 0; i < values_.size(); ++i)
      idx |= static_cast<uint64_t>(values_[i]) << i;
    return idx;
  }

  int size() const { return static_cast<int>(values_.size()); }
  uint8_t operator[](int i) const { return values_[i]; }
  void set(int i, uint8_t v) { values_[i] = v; }
  void flip(int i) { values_[i] ^= 1u; }

  const std::vector<uint8_t>& values() const { return values_; }

  bool operator==(const State& o) const { return values_ == o.values_; }
  bool operator!=(const State& o) const { return values_ != o.values_; }
  bool operator<(const State& o) const { return values_ < o.values_; }

  uint64_t hash() const {
    return fnv1a_bytes(kFnvOffset, values_.data(), values_.size());
  }

 private:
  std::vector<uint8_t> values_;
};

struct StateHash {
  uint64_t operator()(const State& s) const { return s.hash(); }
};

struct Binding {
  int var = -1;
  uint8_t value = 0;
};

// A partial assignment. Serves as both a context (drives symmetry
// computation, no effect on the distribution) and evidence (permanently
// conditions the model); the two play different roles downstream but share
// this representation. Bindings are kept sorted by variable id.
class Assignment {
 public:
  Assignment() = default;

  void bind(int var, uint8_t value) {
    if (var < 0) throw config_error("assignment to invalid variable id");
    auto it = std::lower_bound(
        bindings_.begin(), bindings_.end(), var,
        [](const Binding& b, int v) { return b.var < v; });
    if (it != bindings_.end() && it->var == var)
      throw config_error("variable id " + std::to_string(var) +
                         " repeated in assignment");
    bindings_.insert(it, Binding{var, static_cast<uint8_t>(value ? 1 : 0)});
  }

  bool empty() const { return bindings_.empty(); }
  size_t size() const { return bindings_.size(); }
  const std::vector<Binding>& bindings() const { return bindings_; }

  bool binds(int var) const { return value_of(var).has_value(); }

  std::optional<uint8_t> value_of(int var) const {
    auto it = std::lower_bound(
        bindings_.begin(), bindings_.end(), var,
        [](const Binding& b, int v) { return b.var < v; });
    if (it != bindings_.end() && it->var == var) return it->value;
    return std::nullopt;
  }

  // Union of two assignments; overlap is an error by construction.
  static Assignment merged(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    for (const Binding& x : b.bindings()) {
      if (out.binds(x.var))
        throw config_error("context and evidence overlap on variable id " +
                           std::to_string(x.var));
      out.bind(x.var, x.value);
    }
    return out;
  }

 private:
  std::vector<Binding> bindings_;
};

using Context = Assignment;
using Evidence = Assignment;

inline bool satisfied(const Clause& c, const State& s) {
  for (const Literal& l : c.literals)
    if ((s[l.var] != 0) == l.positive) return true;
  return false;
}

// Sum of weights of satisfied clauses; the unnormalized log probability.
inline double log_weight(const Model& m, const State& s) {
  if (s.size() != m.num_variables())
    throw dimension_error("state length does not match model");
  double total = 0.0;
  for (const Clause& c : m.clauses())
    if (satisfied(c, s)) total += c.weight;
  return total;
}

inline bool consistent(const State& s, const Assignment& a) {
  for (const Binding& b : a.bindings()) {
    if (b.var >= s.size())
      throw dimension_error("assignment variable outside state");
    if (s[b.var] != b.value) return false;
  }
  return true;
}

// A model reduced under a partial assignment, together with the index maps
// needed to lift reduced-variable permutations back to original ids.
struct ReducedModel {
  Model model;
  std::vector<int> orig_of_reduced;  // reduced id -> original id
  std::vector<int> reduced_of_orig;  // original id -> reduced id, -1 if assigned
  // Total weight of clauses deleted because the assignment satisfied them.
  // For any state consistent with the assignment,
  //   log_weight(original, s) = log_weight(reduced, restrict(s)) + satisfied_weight.
  double satisfied_weight = 0.0;
};

// Substitutes the assignment into every clause: a satisfied literal deletes
// the clause, a falsified literal is dropped, empty residues are dropped.
// Remaining variables are re-indexed densely.
inline ReducedModel reduce(const Model& m, const Assignment& a) {
  ReducedModel out;
  out.reduced_of_orig.assign(m.num_variables(), -1);
  for (const Binding& b : a.bindings())
    if (b.var >= m.num_variables())
      throw dimension_error("assignment variable outside model");

  for (int v = 0; v < m.num_variables(); ++v) {
    if (a.binds(v)) continue;
    out.reduced_of_orig[v] = out.model.add_variable(m.variable(v).name);
    out.orig_of_reduced.push_back(v);
  }

  for (const Clause& c : m.clauses()) {
    bool clause_satisfied = false;
    std::vector<Literal> kept;
    for (const Literal& l : c.literals) {
      auto bound = a.value_of(l.var);
      if (!bound) {
        kept.push_back(Literal{out.reduced_of_orig[l.var], l.positive});
      } else if ((*bound != 0) == l.positive) {
        clause_satisfied = true;
        break;
      }
      // falsified literal: dropped
    }
    if (clause_satisfied) {
      out.satisfied_weight += c.weight;
      continue;
    }
    if (kept.empty()) continue;  // constant residue, irrelevant after normalization
    out.model.add_clause(std::move(kept), c.weight);
  }
  return out;
}

// Projection of a full state onto the reduced variable set.
inline State restrict_state(const ReducedModel& r, const State& full) {
  State s(static_cast<int>(r.orig_of_reduced.size()));
  for (size_t i = 0; i < r.orig_of_reduced.size(); ++i)
    s.set(static_cast<int>(i), full[r.orig_of_reduced[i]]);
  return s;
}

constexpr int kDefaultExactCap = 20;

// Brute-force oracle: the full normalized distribution over 2^n states,
// indexed by State::to_index. States inconsistent with the condition get
// probability zero.
inline std::vector<double> exact_distribution(const Model& m,
                                              const Assignment& condition = {},
                                              int cap = kDefaultExactCap) {
  int n = m.num_variables();
  if (n > cap)
    throw resource_error("oracle scale exceeded: " + std::to_string(n) +
                         " variables > cap " + std::to_string(cap));
  uint64_t total = 1ull << n;
  std::vector<double> logw(total, 0.0);
  double max_lw = -1e300;
  bool any = false;
  for (uint64_t idx = 0; idx < total; ++idx) {
    State s = State::from_index(n, idx);
    if (!condition.empty() && !consistent(s, condition)) {
      logw[idx] = -1e300;
      continue;
    }
    logw[idx] = log_weight(m, s);
    max_lw = std::max(max_lw, logw[idx]);
    any = true;
  }
  if (!any) throw config_error("condition excludes every state");
  std::vector<double> probs(total, 0.0);
  double z = 0.0;
  for (uint64_t idx = 0; idx < total; ++idx) {
    if (logw[idx] <= -1e300) continue;
    probs[idx] = std::exp(logw[idx] - max_lw);
    z += probs[idx];
  }
  for (double& p : probs) p /= z;
  return probs;
}

// Per-variable P(X_i = 1) from an exact distribution.
inline std::vector<double> marginals_of_distribution(
    const std::vector<double>& probs, int n) {
  std::vector<double> out(n, 0.0);
  for (uint64_t idx = 0; idx < probs.size(); ++idx) {
    if (probs[idx] == 0.0) continue;
    for (int i = 0; i < n; ++i)
      if ((idx >> i) & 1u) out[i] += probs[idx];
  }
  return out;
}

inline std::vector<double> exact_marginals(const Model& m,
                                           const Assignment& condition = {},
                                           int cap = kDefaultExactCap) {
  return marginals_of_distribution(exact_distribution(m, condition, cap),
                                   m.num_variables());
}

// --- text formats -----------------------------------------------------------
//
// Model file, one declaration per line:
//   var <name>
//   <weight> : <lit> | <lit> | ...      lit = <name> or !<name>
//   # comment
// Assignment (context/evidence) file: lines of <name>=0|1.

inline Model parse_model(std::string_view text) {
  Model m;
  int lineno = 0;
  for (std::string_view raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& msg) {
      throw parse_error("model line " + std::to_string(lineno) + ": " + msg);
    };
    if (line.substr(0, 4) == "var " || line == "var") {
      std::string name(trim(line.substr(3)));
      if (name.empty()) fail("missing variable name");
      try {
        m.add_variable(name);
      } catch (const parse_error& e) {
        fail(e.what());
      }
      continue;
    }
    size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      fail("expected 'var <name>' or '<weight> : <literals>'");
    double w;
    try {
      w = parse_double(trim(line.substr(0, colon)), "clause weight");
    } catch (const parse_error& e) {
      fail(e.what());
    }
    std::vector<Literal> lits;
    std::string_view rest = line.substr(colon + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t bar = rest.find('|', pos);
      std::string_view tok =
          trim(bar == std::string_view::npos ? rest.substr(pos)
                                             : rest.substr(pos, bar - pos));
      if (tok.empty()) fail("empty literal");
      bool positive = true;
      if (tok[0] == '!') {
        positive = false;
        tok = trim(tok.substr(1));
        if (tok.empty()) fail("empty literal after '!'");
      }
      int id = m.find_variable(std::string(tok));
      if (id < 0) fail("unknown variable '" + std::string(tok) + "'");
      lits.push_back(Literal{id, positive});
      if (bar == std::string_view::npos) break;
      pos = bar + 1;
    }
    try {
      m.add_clause(std::move(lits), w);
    } catch (const parse_error& e) {
      fail(e.what());
    }
  }
  return m;
}

inline std::string model_to_text(const Model& m) {
  std::string out;
  for (const Variable& v : m.variables()) {
    out += "var ";
    out += v.name;
    out += '\n';
  }
  for (const Clause& c : m.clauses()) {
    out += format_weight(c.weight);
    out += " : ";
    for (size_t i = 0; i < c.literals.size(); ++i) {
      if (i) out += " | ";
      if (!c.literals[i].positive) out += '!';
      out += m.variable(c.literals[i].var).name;
    }
    out += '\n';
  }
  return out;
}

inline Assignment parse_assignment(std::string_view text, const Model& m) {
  Assignment a;
  int lineno = 0;
  for (std::string_view raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw parse_error("assignment line " + std::to_string(lineno) +
                        ": expected <name>=0|1");
    std::string name(trim(line.substr(0, eq)));
    std::string_view val = trim(line.substr(eq + 1));
    if (val != "0" && val != "1")
      throw parse_error("assignment line " + std::to_string(lineno) +
                        ": value must be 0 or 1");
    int id = m.find_variable(name);
    if (id < 0)
      throw parse_error("assignment line " + std::to_string(lineno) +
                        ": unknown variable '" + name + "'");
    try {
      a.bind(id, val == "1" ? 1 : 0);
    } catch (const config_error& e) {
      throw parse_error("assignment line " + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return a;
}

inline std::string assignment_to_text(const Assignment& a, const Model& m) {
  std::string out;
  for (const Binding& b : a.bindings()) {
    out += m.variable(b.var).name;
    out += '=';
    out += b.value ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace liftmc
