#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "liftmc/autgroup.hpp"
#include "liftmc/common.hpp"
#include "liftmc/model.hpp"
#include "liftmc/permgroup.hpp"
#include "liftmc/rng.hpp"

namespace liftmc {

enum class ChainKind { gibbs, orbital, con_mcmc };

enum class OrbitSamplerKind { product_replacement, exact_oracle };

// Virtual clocks make runs bit-reproducible: time is steps / steps_per_second
// instead of a wall reading. Real clocks are what the benchmark criteria
// measure; their outputs are not byte-stable.
enum class ClockKind { real, virtual_steps };

inline const char* to_string(ChainKind k) {
  switch (k) {
    case ChainKind::gibbs: return "gibbs";
    case ChainKind::orbital: return "orbital";
    case ChainKind::con_mcmc: return "con_mcmc";
  }
  return "?";
}

inline ChainKind chain_kind_from_string(const std::string& s) {
  if (s == "gibbs") return ChainKind::gibbs;
  if (s == "orbital") return ChainKind::orbital;
  if (s == "con_mcmc") return ChainKind::con_mcmc;
  throw config_error("unknown chain kind '" + s + "'");
}

constexpr int kMaxContextVars = 8;  // symmetry cache is exponential in |V|

struct ChainConfig {
  ChainKind kind = ChainKind::gibbs;
  double alpha = 0.0;                // used by con_mcmc only
  std::vector<int> context_vars;     // V, sorted ids
  Evidence evidence;
  uint64_t seed = 0;
  std::optional<uint64_t> step_budget;
  std::optional<double> time_budget_seconds;
  OrbitSamplerKind orbit_sampler = OrbitSamplerKind::product_replacement;
  ClockKind clock = ClockKind::real;
  double steps_per_second = 1e6;     // virtual clock rate
  uint64_t burn_in_steps = 0;
  std::vector<double> measure_at_seconds;  // ascending clock timestamps
  int pr_slots = PrSampler::kDefaultSlots;
  int pr_burn_in = PrSampler::kDefaultBurnIn;
  size_t orbit_cap = kDefaultOrbitCap;

  void validate(const Model& m) const {
    if (!(alpha >= 0.0 && alpha < 1.0))
      throw config_error("alpha must lie in [0,1)");
    if (!std::is_sorted(context_vars.begin(), context_vars.end()))
      throw config_error("context variable ids must be sorted");
    std::vector<char> seen(m.num_variables(), 0);
    for (int v : context_vars) {
      if (v < 0 || v >= m.num_variables())
        throw config_error("context variable id out of range");
      if (seen[v]) throw config_error("context variable repeated");
      seen[v] = 1;
      if (evidence.binds(v))
        throw config_error("context variable '" + m.variable(v).name +
                           "' is also evidence");
    }
    if (static_cast<int>(context_vars.size()) > kMaxContextVars)
      throw config_error("more than " + std::to_string(kMaxContextVars) +
                         " context variables");
    if (kind == ChainKind::con_mcmc && alpha > 0.0 && context_vars.empty())
      throw config_error("con_mcmc with alpha > 0 needs context variables");
    for (const Binding& b : evidence.bindings())
      if (b.var >= m.num_variables())
        throw config_error("evidence variable id out of range");
    if (!(steps_per_second > 0)) throw config_error("steps_per_second must be positive");
  }
};

// Precomputed contextual symmetry groups for every assignment of V.
// Context index: bit i is the value of context_vars[i].
class SymmetryCache {
 public:
  SymmetryCache() = default;

  static SymmetryCache build(const Model& model, std::vector<int> context_vars,
                             const Evidence& evidence,
                             const AutOptions& options = {}) {
    auto t0 = std::chrono::steady_clock::now();
    SymmetryCache cache;
    std::sort(context_vars.begin(), context_vars.end());
    cache.context_vars_ = std::move(context_vars);
    if (static_cast<int>(cache.context_vars_.size()) > kMaxContextVars)
      throw config_error("more than " + std::to_string(kMaxContextVars) +
                         " context variables");
    size_t count = 1ull << cache.context_vars_.size();
    cache.groups_.reserve(count);
    for (size_t idx = 0; idx < count; ++idx) {
      Context c = cache.context_of_index(idx);
      cache.groups_.push_back(
          contextual_automorphisms(model, c, evidence, options));
    }
    cache.build_seconds_ =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return cache;
  }

  const std::vector<int>& context_vars() const { return context_vars_; }
  size_t num_contexts() const { return groups_.size(); }
  const PermGroup& group(size_t context_index) const {
    return groups_[context_index];
  }

  Context context_of_index(size_t idx) const {
    Context c;
    for (size_t i = 0; i < context_vars_.size(); ++i)
      c.bind(context_vars_[i], (idx >> i) & 1u);
    return c;
  }

  size_t context_index_of(const State& s) const {
    size_t idx = 0;
    for (size_t i = 0; i < context_vars_.size(); ++i)
      idx |= static_cast<size_t>(s[context_vars_[i]] != 0) << i;
    return idx;
  }

  const PermGroup& group_for(const State& s) const {
    return groups_[context_index_of(s)];
  }

  bool any_nontrivial() const {
    for (const PermGroup& g : groups_)
      if (!g.is_trivial()) return true;
    return false;
  }

  double build_seconds() const { return build_seconds_; }

 private:
  std::vector<int> context_vars_;
  std::vector<PermGroup> groups_;
  double build_seconds_ = 0.0;
};

// Per-variable incidence lists; the Markov blanket machinery for Gibbs.
class ClauseIndex {
 public:
  explicit ClauseIndex(const Model& m) : clauses_of_(m.num_variables()) {
    for (int k = 0; k < m.num_clauses(); ++k)
      for (const Literal& l : m.clause(k).literals)
        clauses_of_[l.var].push_back(k);
  }
  const std::vector<int>& clauses_of(int var) const { return clauses_of_[var]; }

 private:
  std::vector<std::vector<int>> clauses_of_;
};

// log-odds contribution of var's incident clauses:
// log_weight(s with var=1) - log_weight(s with var=0).
inline double gibbs_delta(const Model& m, const ClauseIndex& idx,
                          const State& s, int var) {
  double delta = 0.0;
  for (int k : idx.clauses_of(var)) {
    const Clause& c = m.clause(k);
    bool other_sat = false;
    bool positive = true;
    for (const Literal& l : c.literals) {
      if (l.var == var) {
        positive = l.positive;
      } else if (!other_sat && (s[l.var] != 0) == l.positive) {
        other_sat = true;
      }
    }
    if (!other_sat) delta += positive ? c.weight : -c.weight;
  }
  return delta;
}

// P(var = 1 | rest), from the Markov blanket only.
inline double gibbs_conditional(const Model& m, const ClauseIndex& idx,
                                const State& s, int var) {
  double delta = gibbs_delta(m, idx, s, var);
  return 1.0 / (1.0 + std::exp(-delta));
}

// Resample one uniformly chosen free variable; returns (id, old value).
inline std::pair<int, uint8_t> gibbs_step(const Model& m, const ClauseIndex& idx,
                                          const std::vector<int>& free_vars,
                                          State& s, Rng& rng) {
  int var = free_vars[rng.uniform_int(free_vars.size())];
  uint8_t old = s[var];
  double p1 = gibbs_conditional(m, idx, s, var);
  s.set(var, rng.uniform01() < p1 ? 1 : 0);
  return {var, old};
}

// Base move followed by a uniform move within the state's orbit; the group
// is the context-free (orbital) automorphism group.
inline void orbital_step(const Model& m, const ClauseIndex& idx,
                         const std::vector<int>& free_vars, State& s,
                         const PermGroup& group, PrSampler& pr, Rng& rng) {
  gibbs_step(m, idx, free_vars, s, rng);
  if (!group.is_trivial()) s = apply(pr.step(), s);
}

// Two-stage kernel: with probability alpha a Gibbs resample of a random
// context variable, otherwise a base-chain move; then a uniform draw from
// the contextual orbit of the intermediate state, whose group is looked up
// by the context consistent with that intermediate state.
inline void con_mcmc_step(const Model& m, const ClauseIndex& idx,
                          const std::vector<int>& free_vars, State& s,
                          const SymmetryCache& cache,
                          std::vector<PrSampler>& pr_by_context, double alpha,
                          Rng& rng) {
  if (alpha > 0.0 && rng.uniform01() < alpha) {
    int var = cache.context_vars()[rng.uniform_int(cache.context_vars().size())];
    double p1 = gibbs_conditional(m, idx, s, var);
    s.set(var, rng.uniform01() < p1 ? 1 : 0);
  } else {
    gibbs_step(m, idx, free_vars, s, rng);
  }
  size_t ctx = cache.context_index_of(s);
  const PermGroup& group = cache.group(ctx);
  if (!group.is_trivial()) s = apply(pr_by_context[ctx].step(), s);
}

// --- exact transition matrices ----------------------------------------------

constexpr int kMaxExactMatrixVars = 12;

// Dense row-major stochastic matrix over all 2^n states.
struct TransitionMatrix {
  int num_vars = 0;
  size_t dim = 0;
  std::vector<double> p;

  double at(size_t r, size_t c) const { return p[r * dim + c]; }
  double& at(size_t r, size_t c) { return p[r * dim + c]; }

  double row_sum(size_t r) const {
    double total = 0.0;
    for (size_t c = 0; c < dim; ++c) total += at(r, c);
    return total;
  }
};

// ||pi P - pi||_inf.
inline double stationarity_residual(const TransitionMatrix& t,
                                    const std::vector<double>& pi) {
  double worst = 0.0;
  for (size_t c = 0; c < t.dim; ++c) {
    double acc = 0.0;
    for (size_t r = 0; r < t.dim; ++r) acc += pi[r] * t.at(r, c);
    worst = std::max(worst, std::abs(acc - pi[c]));
  }
  return worst;
}

namespace detail {

// Orbit partition of the full state space: each state joined with its
// images under the generators of its own context's group.
struct OrbitTable {
  std::vector<uint64_t> root;
  std::vector<std::vector<uint64_t>> members;  // by root representative
  std::vector<uint64_t> size_of;               // orbit size per state

  static OrbitTable build(int n, const SymmetryCache& cache) {
    uint64_t total = 1ull << n;
    std::vector<uint64_t> parent(total);
    for (uint64_t i = 0; i < total; ++i) parent[i] = i;
    std::function<uint64_t(uint64_t)> find = [&](uint64_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (uint64_t idx = 0; idx < total; ++idx) {
      State s = State::from_index(n, idx);
      const PermGroup& g = cache.group_for(s);
      for (const Permutation& gen : g.generators) {
        uint64_t img = apply(gen, s).to_index();
        uint64_t a = find(idx), b = find(img);
        if (a != b) parent[a] = b;
      }
    }
    OrbitTable t;
    t.root.resize(total);
    t.size_of.resize(total);
    std::unordered_map<uint64_t, size_t> slot;
    for (uint64_t i = 0; i < total; ++i) {
      uint64_t r = find(i);
      t.root[i] = r;
      auto it = slot.find(r);
      if (it == slot.end()) {
        it = slot.emplace(r, t.members.size()).first;
        t.members.emplace_back();
      }
      t.members[it->second].push_back(i);
    }
    for (uint64_t i = 0; i < total; ++i)
      t.size_of[i] = t.members[slot[t.root[i]]].size();
    // replace root by member-list slot for direct lookup
    for (uint64_t i = 0; i < total; ++i) t.root[i] = slot[t.root[i]];
    return t;
  }
};

}  // namespace detail

// Exact kernel of the configured chain by full enumeration: step-1 mixture
// probabilities composed with uniform-orbit averaging. Requires the exact
// orbit oracle for the symmetry-using chains.
inline TransitionMatrix exact_transition_matrix(const Model& m,
                                                const ChainConfig& config,
                                                const SymmetryCache* cache) {
  config.validate(m);
  int n = m.num_variables();
  if (n > kMaxExactMatrixVars)
    throw resource_error("exact transition matrix capped at " +
                         std::to_string(kMaxExactMatrixVars) + " variables");
  bool uses_orbits = config.kind != ChainKind::gibbs;
  if (uses_orbits) {
    if (config.orbit_sampler != OrbitSamplerKind::exact_oracle)
      throw config_error(
          "exact transition matrix requires the exact orbit oracle");
    if (cache == nullptr)
      throw config_error("symmetry cache required for this chain kind");
  }

  ClauseIndex idx(m);
  std::vector<int> free_vars;
  for (int v = 0; v < n; ++v)
    if (!config.evidence.binds(v)) free_vars.push_back(v);
  if (free_vars.empty()) throw config_error("no free variables to sample");

  uint64_t total = 1ull << n;
  TransitionMatrix t;
  t.num_vars = n;
  t.dim = total;
  t.p.assign(total * total, 0.0);

  std::optional<detail::OrbitTable> orbits;
  if (uses_orbits) orbits = detail::OrbitTable::build(n, *cache);

  std::vector<double> step1(total);
  for (uint64_t r = 0; r < total; ++r) {
    State s = State::from_index(n, r);
    if (!consistent(s, config.evidence)) {
      t.at(r, r) = 1.0;  // unreachable from the conditioned chain
      continue;
    }

    std::fill(step1.begin(), step1.end(), 0.0);
    auto add_resample_kernel = [&](const std::vector<int>& vars,
                                   double mass) {
      for (int v : vars) {
        double p1 = gibbs_conditional(m, idx, s, v);
        uint64_t r1 = r | (1ull << v);
        uint64_t r0 = r1 ^ (1ull << v);
        step1[r1] += mass / vars.size() * p1;
        step1[r0] += mass / vars.size() * (1.0 - p1);
      }
    };

    switch (config.kind) {
      case ChainKind::gibbs:
      case ChainKind::orbital:
        add_resample_kernel(free_vars, 1.0);
        break;
      case ChainKind::con_mcmc:
        if (config.alpha > 0.0)
          add_resample_kernel(config.context_vars, config.alpha);
        add_resample_kernel(free_vars, 1.0 - config.alpha);
        break;
    }

    if (!uses_orbits) {
      for (uint64_t c = 0; c < total; ++c) t.at(r, c) = step1[c];
      continue;
    }
    for (uint64_t mid = 0; mid < total; ++mid) {
      if (step1[mid] == 0.0) continue;
      double share = step1[mid] / static_cast<double>(orbits->size_of[mid]);
      for (uint64_t dest : orbits->members[orbits->root[mid]])
        t.at(r, dest) += share;
    }
  }
  return t;
}

// --- chain runner ------------------------------------------------------------

struct MeasurementRow {
  uint64_t step = 0;
  double clock_seconds = 0.0;
  std::vector<double> marginals;
};

struct RunRecord {
  uint64_t seed = 0;
  uint64_t steps = 0;
  double symmetry_seconds = 0.0;  // charged to the chain's clock
  double sampling_seconds = 0.0;  // real time spent sampling (diagnostic)
  bool ended_by_time = false;
  std::vector<MeasurementRow> rows;
};

namespace detail {

// Time-weighted running means with lazy per-variable flushing, so a Gibbs
// step costs O(1) bookkeeping instead of O(n).
class MarginalAccumulator {
 public:
  explicit MarginalAccumulator(int n)
      : sum_(n, 0.0), mark_(n, 0), start_step_(0) {}

  void on_flip(int var, uint8_t old_value, uint64_t sample_index) {
    sum_[var] += old_value * static_cast<double>(sample_index - 1 - mark_[var]);
    mark_[var] = sample_index - 1;
  }

  void reset(const State& s, uint64_t sample_index) {
    std::fill(sum_.begin(), sum_.end(), 0.0);
    std::fill(mark_.begin(), mark_.end(), sample_index);
    start_step_ = sample_index;
  }

  // Marginals after `sample_index` samples; 0.5 before any sample.
  std::vector<double> snapshot(const State& s, uint64_t sample_index) {
    uint64_t span = sample_index - start_step_;
    std::vector<double> out(sum_.size(), 0.5);
    if (span == 0) return out;
    for (size_t v = 0; v < sum_.size(); ++v) {
      double total = sum_[v] + s[static_cast<int>(v)] *
                                   static_cast<double>(sample_index - mark_[v]);
      out[v] = total / static_cast<double>(span);
    }
    return out;
  }

 private:
  std::vector<double> sum_;
  std::vector<uint64_t> mark_;
  uint64_t start_step_;
};

}  // namespace detail

// Runs one chain to its step and/or clock budget, charging symmetry-cache
// construction time to the chain when a cache is supplied. Virtual clocks
// ignore wall time entirely (including the symmetry charge), which is what
// makes fixed-seed runs byte-identical.
inline RunRecord run_chain(const Model& m, const ChainConfig& config,
                           const SymmetryCache* cache) {
  config.validate(m);
  if (!config.step_budget && !config.time_budget_seconds &&
      config.measure_at_seconds.empty())
    throw config_error("chain needs a step budget, time budget, or schedule");

  bool needs_cache = config.kind != ChainKind::gibbs;
  if (needs_cache && cache == nullptr)
    throw config_error("symmetry cache required for this chain kind");
  if (config.kind == ChainKind::orbital && !cache->context_vars().empty())
    throw config_error("orbital chain expects a context-free symmetry cache");
  if (config.kind == ChainKind::con_mcmc &&
      cache->context_vars() != config.context_vars)
    throw config_error("symmetry cache context variables do not match config");

  int n = m.num_variables();
  ClauseIndex idx(m);
  std::vector<int> free_vars;
  for (int v = 0; v < n; ++v)
    if (!config.evidence.binds(v)) free_vars.push_back(v);
  if (free_vars.empty()) throw config_error("no free variables to sample");

  Rng rng(derive_seed(config.seed, 0));
  State s(n);
  for (int v = 0; v < n; ++v) s.set(v, rng.coin() ? 1 : 0);
  for (const Binding& b : config.evidence.bindings()) s.set(b.var, b.value);

  std::vector<PrSampler> pr_by_context;
  if (needs_cache &&
      config.orbit_sampler == OrbitSamplerKind::product_replacement) {
    for (size_t c = 0; c < cache->num_contexts(); ++c)
      pr_by_context.emplace_back(cache->group(c),
                                 derive_seed(config.seed, 1000 + c),
                                 config.pr_slots, config.pr_burn_in);
  }
  Rng orbit_rng(derive_seed(config.seed, 2));  // exact-oracle draws

  RunRecord record;
  record.seed = config.seed;
  record.symmetry_seconds = cache ? cache->build_seconds() : 0.0;

  double clock_offset =
      (config.clock == ClockKind::real && needs_cache) ? record.symmetry_seconds
                                                       : 0.0;
  auto t0 = std::chrono::steady_clock::now();
  auto real_elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  auto clock_now = [&](uint64_t steps) {
    return config.clock == ClockKind::real
               ? clock_offset + real_elapsed()
               : static_cast<double>(steps) / config.steps_per_second;
  };

  detail::MarginalAccumulator acc(n);
  State scratch(n);
  uint64_t step = 0;
  size_t next_measure = 0;

  auto measure_due = [&]() {
    return next_measure < config.measure_at_seconds.size() &&
           clock_now(step) >= config.measure_at_seconds[next_measure];
  };
  auto take_measurements = [&]() {
    while (measure_due()) {
      MeasurementRow row;
      row.step = step;
      row.clock_seconds = config.clock == ClockKind::real
                              ? clock_now(step)
                              : config.measure_at_seconds[next_measure];
      row.marginals = acc.snapshot(s, step);
      record.rows.push_back(std::move(row));
      ++next_measure;
    }
  };

  take_measurements();  // points already past at t=0 (symmetry charge)

  // Wall readings are polled in batches; virtual clocks are arithmetic and
  // get exact measurement boundaries.
  const uint64_t check_every =
      config.clock == ClockKind::real ? 64 : 1;
  for (;;) {
    if (config.step_budget && step >= *config.step_budget) {
      record.ended_by_time = false;
      break;
    }
    if (config.time_budget_seconds && (step % check_every == 0) &&
        clock_now(step) >= *config.time_budget_seconds) {
      record.ended_by_time = true;
      break;
    }
    if (!config.step_budget && !config.time_budget_seconds &&
        next_measure >= config.measure_at_seconds.size())
      break;  // schedule exhausted

    switch (config.kind) {
      case ChainKind::gibbs: {
        auto [var, old] = gibbs_step(m, idx, free_vars, s, rng);
        ++step;
        if (s[var] != old) acc.on_flip(var, old, step);
        break;
      }
      case ChainKind::orbital:
      case ChainKind::con_mcmc: {
        const bool con = config.kind == ChainKind::con_mcmc;
        int base_var;
        uint8_t base_old;
        if (con && config.alpha > 0.0 && rng.uniform01() < config.alpha) {
          base_var = cache->context_vars()[rng.uniform_int(
              cache->context_vars().size())];
          base_old = s[base_var];
          double p1 = gibbs_conditional(m, idx, s, base_var);
          s.set(base_var, rng.uniform01() < p1 ? 1 : 0);
        } else {
          std::tie(base_var, base_old) = gibbs_step(m, idx, free_vars, s, rng);
        }
        if (s[base_var] != base_old) acc.on_flip(base_var, base_old, step + 1);

        size_t ctx = con ? cache->context_index_of(s) : 0;
        const PermGroup& group = cache->group(ctx);
        if (!group.is_trivial()) {
          if (config.orbit_sampler == OrbitSamplerKind::product_replacement) {
            apply_into(pr_by_context[ctx].step(), s, scratch);
          } else {
            scratch = exact_uniform_orbit_sample(group, s, orbit_rng,
                                                 config.orbit_cap);
          }
          for (int v = 0; v < n; ++v)
            if (scratch[v] != s[v]) acc.on_flip(v, s[v], step + 1);
          std::swap(s, scratch);
        }
        ++step;
        break;
      }
    }

    if (step == config.burn_in_steps) acc.reset(s, step);
    if (step % check_every == 0 || config.clock == ClockKind::virtual_steps)
      take_measurements();
  }

  // Flush any trailing schedule points (e.g. budget hit first).
  take_measurements();
  if (record.rows.empty() || config.measure_at_seconds.empty()) {
    MeasurementRow row;
    row.step = step;
    row.clock_seconds = clock_now(step);
    row.marginals = acc.snapshot(s, step);
    record.rows.push_back(std::move(row));
  }

  record.steps = step;
  record.sampling_seconds = real_elapsed();
  return record;
}

// Canonical config echo; also the basis of the config hash carried by CSVs.
inline std::string config_to_string(const Model& m, const ChainConfig& c) {
  std::string out;
  out += "kind=";
  out += to_string(c.kind);
  out += " alpha=" + format_weight(c.alpha);
  out += " context_vars=";
  for (size_t i = 0; i < c.context_vars.size(); ++i) {
    if (i) out += ',';
    out += m.variable(c.context_vars[i]).name;
  }
  out += " evidence=";
  for (size_t i = 0; i < c.evidence.bindings().size(); ++i) {
    const Binding& b = c.evidence.bindings()[i];
    if (i) out += ',';
    out += m.variable(b.var).name;
    out += b.value ? "=1" : "=0";
  }
  out += " seed=" + std::to_string(c.seed);
  if (c.step_budget) out += " steps=" + std::to_string(*c.step_budget);
  if (c.time_budget_seconds)
    out += " budget_seconds=" + format_weight(*c.time_budget_seconds);
  out += std::string(" orbit_sampler=") +
         (c.orbit_sampler == OrbitSamplerKind::product_replacement ? "pr"
                                                                   : "exact");
  out += std::string(" clock=") +
         (c.clock == ClockKind::real ? "real" : "virtual");
  if (c.clock == ClockKind::virtual_steps)
    out += " steps_per_second=" + format_weight(c.steps_per_second);
  out += " burn_in=" + std::to_string(c.burn_in_steps);
  return out;
}

inline uint64_t config_hash(const Model& m, const ChainConfig& c) {
  std::string s = config_to_string(m, c);
  return fnv1a_bytes(kFnvOffset, s.data(), s.size());
}

// RunRecord CSV: metadata header then one row per (measurement, variable).
inline std::string run_record_to_csv(const Model& m, const ChainConfig& c,
                                     const RunRecord& r, int run_id) {
  char buf[64];
  std::string out;
  out += "# config: " + config_to_string(m, c) + "\n";
  out += "# seed: " + std::to_string(c.seed) + "\n";
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(m, c)));
  out += std::string("# config_hash: ") + buf + "\n";
  out += "run_id,step,wall_clock_seconds,variable,marginal_estimate\n";
  for (const MeasurementRow& row : r.rows) {
    for (int v = 0; v < m.num_variables(); ++v) {
      out += std::to_string(run_id);
      out += ',';
      out += std::to_string(row.step);
      out += ',';
      std::snprintf(buf, sizeof(buf), "%.10g", row.clock_seconds);
      out += buf;
      out += ',';
      out += m.variable(v).name;
      out += ',';
      std::snprintf(buf, sizeof(buf), "%.10g", row.marginals[v]);
      out += buf;
      out += '\n';
    }
  }
  return out;
}

}  // namespace liftmc
