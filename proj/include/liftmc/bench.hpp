#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "liftmc/common.hpp"
#include "liftmc/domains.hpp"
#include "liftmc/model.hpp"
#include "liftmc/samplers.hpp"

namespace liftmc {

// --- ground truth ------------------------------------------------------------

struct TruthSpec {
  enum class Mode { exact, reference } mode = Mode::exact;
  uint64_t steps = 10'000'000;     // reference chain length
  double burn_in_fraction = 0.1;
  uint64_t seed = 7777;
};

inline const char* to_string(TruthSpec::Mode m) {
  return m == TruthSpec::Mode::exact ? "exact" : "reference";
}

// Exact enumeration when the model is small enough, otherwise a long
// reference Gibbs chain with a recorded seed and step count. Evidence
// variables report their pinned value.
inline std::vector<double> ground_truth(const Model& m, const Evidence& evidence,
                                        const TruthSpec& spec) {
  if (spec.mode == TruthSpec::Mode::exact)
    return exact_marginals(m, evidence);

  ChainConfig config;
  config.kind = ChainKind::gibbs;
  config.evidence = evidence;
  config.seed = spec.seed;
  config.step_budget = spec.steps;
  config.burn_in_steps =
      static_cast<uint64_t>(spec.burn_in_fraction * spec.steps);
  config.clock = ClockKind::virtual_steps;
  RunRecord record = run_chain(m, config, nullptr);
  std::vector<double> out = record.rows.back().marginals;
  for (const Binding& b : evidence.bindings()) out[b.var] = b.value;
  return out;
}

// --- KL scoring ---------------------------------------------------------------

constexpr double kKlClamp = 1e-6;

inline double bernoulli_kl(double p, double q) {
  q = std::min(1.0 - kKlClamp, std::max(kKlClamp, q));
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return kl;
}

// Mean Bernoulli KL(truth || estimate) over non-evidence variables, with
// the estimate clamped away from 0 and 1.
inline double kl_score(const std::vector<double>& truth,
                       const std::vector<double>& estimate,
                       const Evidence& evidence = {}) {
  if (truth.size() != estimate.size())
    throw dimension_error("marginal vectors differ in length");
  double total = 0.0;
  int count = 0;
  for (size_t v = 0; v < truth.size(); ++v) {
    if (evidence.binds(static_cast<int>(v))) continue;
    total += bernoulli_kl(truth[v], estimate[v]);
    ++count;
  }
  if (count == 0) throw config_error("no free variables to score");
  return total / count;
}

// --- experiment specification --------------------------------------------------

struct DomainSpec {
  enum class Family { sports, young_old, file } family = Family::sports;
  SportsParams sports;
  YoungOldParams young_old;
  std::string model_text;                       // family == file
  std::vector<std::string> context_var_names;   // family == file

  Domain instantiate() const {
    switch (family) {
      case Family::sports: return gen_sports(sports);
      case Family::young_old: return gen_young_old(young_old);
      case Family::file: {
        Domain d;
        d.model = parse_model(model_text);
        for (const std::string& name : context_var_names)
          d.context_vars.push_back(d.model.require_variable(name));
        std::sort(d.context_vars.begin(), d.context_vars.end());
        return d;
      }
    }
    throw config_error("unknown domain family");
  }

  // The single knob the posterior sweep adjusts.
  void set_context_prior(double w) {
    if (family == Family::sports) sports.sport_prior = w;
    else if (family == Family::young_old) young_old.young_prior = w;
    else throw config_error("posterior sweep needs a generated domain");
  }

  void set_size(int size) {
    if (family == Family::sports) sports.num_students = size;
    else if (family == Family::young_old) young_old.num_people = size;
    else throw config_error("size sweep needs a generated domain");
  }
};

struct ChainSpec {
  std::string name;
  ChainKind kind = ChainKind::gibbs;
  double alpha = 0.0;
  OrbitSamplerKind orbit_sampler = OrbitSamplerKind::product_replacement;
};

struct ExperimentSpec {
  std::string name = "experiment";
  DomainSpec domain;
  double evidence_fraction = 0.0;  // random evidence on non-relational vars
  uint64_t evidence_seed = 1;
  std::string evidence_text;       // explicit <name>=0|1 lines, may be empty
  std::vector<ChainSpec> chains;
  int repeats = 20;
  uint64_t seed = 1;
  double budget_seconds = 30.0;    // per chain, in clock units
  int schedule_points = 15;
  ClockKind clock = ClockKind::real;
  double steps_per_second = 1e6;
  TruthSpec truth;
  int workers = 1;

  void validate() const {
    if (chains.empty()) throw config_error("experiment needs at least one chain");
    if (repeats < 1) throw config_error("repeats must be >= 1");
    if (schedule_points < 1) throw config_error("schedule_points must be >= 1");
    if (!(budget_seconds > 0)) throw config_error("budget must be positive");
    if (evidence_fraction < 0 || evidence_fraction > 1)
      throw config_error("evidence fraction must lie in [0,1]");
    if (workers < 1) throw config_error("workers must be >= 1");
  }
};

// Random evidence on variables that are neither context nor relational
// (Friends_* style pair predicates), mirroring the evidence-control setup.
inline Evidence random_evidence(const Model& m,
                                const std::vector<int>& context_vars,
                                double fraction, uint64_t seed) {
  Evidence e;
  if (fraction <= 0) return e;
  std::vector<int> eligible;
  for (int v = 0; v < m.num_variables(); ++v) {
    if (std::find(context_vars.begin(), context_vars.end(), v) !=
        context_vars.end())
      continue;
    const std::string& name = m.variable(v).name;
    if (name.rfind("Friends_", 0) == 0 || name.rfind("D_", 0) == 0) continue;
    eligible.push_back(v);
  }
  Rng rng(derive_seed(seed, 31));
  size_t want = static_cast<size_t>(fraction * eligible.size());
  for (size_t i = 0; i < want && !eligible.empty(); ++i) {
    size_t pick = rng.uniform_int(eligible.size());
    int var = eligible[pick];
    eligible.erase(eligible.begin() + pick);
    e.bind(var, rng.coin() ? 1 : 0);
  }
  return e;
}

// --- experiment runner ----------------------------------------------------------

struct ChainCurve {
  std::string name;
  ChainKind kind = ChainKind::gibbs;
  double alpha = 0.0;
  uint64_t cfg_hash = 0;
  double symmetry_seconds = 0.0;
  std::vector<double> timestamps;               // nominal schedule
  std::vector<std::vector<double>> kl;          // [repeat][point]
  std::vector<std::vector<double>> clock;       // [repeat][point], recorded
  std::vector<double> mean, ci_lo, ci_hi;       // per point

  double final_mean() const { return mean.back(); }
  double final_ci_lo() const { return ci_lo.back(); }
  double final_ci_hi() const { return ci_hi.back(); }
};

struct ExperimentResult {
  std::vector<double> truth;
  Evidence evidence;
  std::vector<ChainCurve> curves;
  std::string runs_csv;
  std::string summary_csv;

  const ChainCurve& curve(const std::string& name) const {
    for (const ChainCurve& c : curves)
      if (c.name == name) return c;
    throw config_error("no chain named '" + name + "'");
  }
};

namespace detail {

inline void mean_ci95(const std::vector<double>& xs, double& mean, double& lo,
                      double& hi) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - m) * (x - m);
  var = xs.size() > 1 ? var / (xs.size() - 1) : 0.0;
  double half = 1.96 * std::sqrt(var / xs.size());
  mean = m;
  lo = m - half;
  hi = m + half;
}

inline void run_indexed_parallel(int jobs, int workers,
                                 const std::function<void(int)>& fn) {
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int n_threads = std::min(workers, jobs);
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= jobs) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  Domain domain = spec.domain.instantiate();
  const Model& model = domain.model;

  Evidence evidence;
  if (!spec.evidence_text.empty())
    evidence = parse_assignment(spec.evidence_text, model);
  if (spec.evidence_fraction > 0)
    evidence = Assignment::merged(
        evidence, random_evidence(model, domain.context_vars,
                                  spec.evidence_fraction, spec.evidence_seed));

  ExperimentResult result;
  result.evidence = evidence;
  result.truth = ground_truth(model, evidence, spec.truth);

  std::vector<double> schedule(spec.schedule_points);
  for (int i = 0; i < spec.schedule_points; ++i)
    schedule[i] = spec.budget_seconds * (i + 1) / spec.schedule_points;

  // One symmetry cache per distinct context-variable set; each chain using
  // it is charged its full build time, as if it had computed it itself.
  std::map<std::vector<int>, SymmetryCache> caches;
  auto cache_for = [&](const std::vector<int>& vars) -> const SymmetryCache& {
    auto it = caches.find(vars);
    if (it == caches.end())
      it = caches.emplace(vars, SymmetryCache::build(model, vars, evidence))
               .first;
    return it->second;
  };

  struct Job {
    size_t chain_index;
    int repeat;
    ChainConfig config;
    const SymmetryCache* cache;
  };
  std::vector<Job> jobs;

  for (size_t ci = 0; ci < spec.chains.size(); ++ci) {
    const ChainSpec& cs = spec.chains[ci];
    ChainCurve curve;
    curve.name = cs.name;
    curve.kind = cs.kind;
    curve.alpha = cs.alpha;
    curve.timestamps = schedule;
    curve.kl.resize(spec.repeats);
    curve.clock.resize(spec.repeats);

    ChainConfig config;
    config.kind = cs.kind;
    config.alpha = cs.kind == ChainKind::con_mcmc ? cs.alpha : 0.0;
    if (cs.kind == ChainKind::con_mcmc) config.context_vars = domain.context_vars;
    config.evidence = evidence;
    config.orbit_sampler = cs.orbit_sampler;
    config.clock = spec.clock;
    config.steps_per_second = spec.steps_per_second;
    config.time_budget_seconds = spec.budget_seconds;
    config.measure_at_seconds = schedule;
    config.validate(model);

    const SymmetryCache* cache = nullptr;
    if (cs.kind == ChainKind::orbital) cache = &cache_for({});
    if (cs.kind == ChainKind::con_mcmc) cache = &cache_for(domain.context_vars);
    curve.symmetry_seconds = cache ? cache->build_seconds() : 0.0;
    curve.cfg_hash = config_hash(model, config);
    result.curves.push_back(std::move(curve));

    for (int r = 0; r < spec.repeats; ++r) {
      Job job;
      job.chain_index = ci;
      job.repeat = r;
      job.config = config;
      job.config.seed = derive_seed(spec.seed ^ fnv1a_bytes(kFnvOffset,
                                                            cs.name.data(),
                                                            cs.name.size()),
                                    static_cast<uint64_t>(r));
      job.cache = cache;
      jobs.push_back(std::move(job));
    }
  }

  detail::run_indexed_parallel(
      static_cast<int>(jobs.size()), spec.workers, [&](int j) {
        const Job& job = jobs[j];
        RunRecord record = run_chain(model, job.config, job.cache);
        ChainCurve& curve = result.curves[job.chain_index];
        std::vector<double>& kl = curve.kl[job.repeat];
        std::vector<double>& clk = curve.clock[job.repeat];
        for (const MeasurementRow& row : record.rows) {
          kl.push_back(kl_score(result.truth, row.marginals, evidence));
          clk.push_back(row.clock_seconds);
        }
        // Budget may end the run right at the last boundary; carry the
        // final estimate forward so every repeat covers the schedule.
        while (kl.size() < curve.timestamps.size()) {
          kl.push_back(kl.back());
          clk.push_back(clk.back());
        }
      });

  char buf[64];
  std::string runs;
  runs += "chain,repeat,wall_clock_seconds,mean_kl,config_hash\n";
  std::string summary;
  summary += "chain,wall_clock_seconds,mean_kl,ci95_lo,ci95_hi,config_hash\n";

  for (ChainCurve& curve : result.curves) {
    size_t points = curve.timestamps.size();
    curve.mean.resize(points);
    curve.ci_lo.resize(points);
    curve.ci_hi.resize(points);
    std::vector<double> column(spec.repeats);
    for (size_t p = 0; p < points; ++p) {
      for (int r = 0; r < spec.repeats; ++r) column[r] = curve.kl[r][p];
      detail::mean_ci95(column, curve.mean[p], curve.ci_lo[p], curve.ci_hi[p]);
    }
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(curve.cfg_hash));
    std::string hash(buf);
    for (int r = 0; r < spec.repeats; ++r)
      for (size_t p = 0; p < points; ++p) {
        runs += curve.name + "," + std::to_string(r) + ",";
        std::snprintf(buf, sizeof(buf), "%.10g", curve.clock[r][p]);
        runs += buf;
        runs += ",";
        std::snprintf(buf, sizeof(buf), "%.10g", curve.kl[r][p]);
        runs += buf;
        runs += "," + hash + "\n";
      }
    for (size_t p = 0; p < points; ++p) {
      summary += curve.name + ",";
      std::snprintf(buf, sizeof(buf), "%.10g", curve.timestamps[p]);
      summary += buf;
      summary += ",";
      std::snprintf(buf, sizeof(buf), "%.10g", curve.mean[p]);
      summary += buf;
      summary += ",";
      std::snprintf(buf, sizeof(buf), "%.10g", curve.ci_lo[p]);
      summary += buf;
      summary += ",";
      std::snprintf(buf, sizeof(buf), "%.10g", curve.ci_hi[p]);
      summary += buf;
      summary += "," + hash + "\n";
    }
  }
  result.runs_csv = std::move(runs);
  result.summary_csv = std::move(summary);
  return result;
}

// --- control sweeps --------------------------------------------------------------

enum class SweepAxis { domain_size, evidence, posterior, alpha };

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "domain_size") return SweepAxis::domain_size;
  if (s == "evidence") return SweepAxis::evidence;
  if (s == "posterior") return SweepAxis::posterior;
  if (s == "alpha") return SweepAxis::alpha;
  throw config_error("unknown sweep axis '" + s + "'");
}

// Bisection on the context variable's prior clause weight until the
// ground-truth marginal of the context variable hits the target.
inline double calibrate_context_prior(const DomainSpec& domain, double target,
                                      const TruthSpec& truth,
                                      const Evidence& evidence = {},
                                      double tolerance = 0.02) {
  if (!(target > 0.0 && target < 1.0))
    throw config_error("target posterior must lie in (0,1)");
  auto marginal_at = [&](double w) {
    DomainSpec d = domain;
    d.set_context_prior(w);
    Domain inst = d.instantiate();
    std::vector<double> marg = ground_truth(inst.model, evidence, truth);
    return marg[inst.context_vars.front()];
  };
  double lo = -10.0, hi = 10.0;
  if (marginal_at(lo) > target) throw config_error("target below reachable range");
  if (marginal_at(hi) < target) throw config_error("target above reachable range");
  double w = 0.0;
  for (int iter = 0; iter < 60; ++iter) {
    w = 0.5 * (lo + hi);
    double m = marginal_at(w);
    if (std::abs(m - target) <= tolerance) return w;
    (m < target ? lo : hi) = w;
  }
  return w;
}

struct SweepPoint {
  double value = 0.0;
  ExperimentSpec spec;
};

// Expands a template over one swept axis. The posterior axis re-calibrates
// the context prior for every target value.
inline std::vector<SweepPoint> expand_sweep(const ExperimentSpec& base,
                                            SweepAxis axis,
                                            const std::vector<double>& values) {
  std::vector<SweepPoint> out;
  for (double value : values) {
    SweepPoint point;
    point.value = value;
    point.spec = base;
    switch (axis) {
      case SweepAxis::domain_size:
        point.spec.domain.set_size(static_cast<int>(value));
        point.spec.name = base.name + "_size_" + std::to_string(static_cast<int>(value));
        break;
      case SweepAxis::evidence:
        point.spec.evidence_fraction = value;
        point.spec.name = base.name + "_evidence_" + format_weight12(value);
        break;
      case SweepAxis::posterior: {
        double w = calibrate_context_prior(base.domain, value, base.truth);
        point.spec.domain.set_context_prior(w);
        point.spec.name = base.name + "_posterior_" + format_weight12(value);
        break;
      }
      case SweepAxis::alpha:
        for (ChainSpec& c : point.spec.chains)
          if (c.kind == ChainKind::con_mcmc) c.alpha = value;
        point.spec.name = base.name + "_alpha_" + format_weight12(value);
        break;
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace liftmc
