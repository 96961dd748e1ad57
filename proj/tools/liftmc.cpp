// Command-line surface: generate benchmark models, inspect contextual
// symmetries, run single chains, run benchmark experiments and sweeps, and
// check the exact oracles.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liftmc/autgroup.hpp"
#include "liftmc/bench.hpp"
#include "liftmc/configfile.hpp"
#include "liftmc/domains.hpp"
#include "liftmc/model.hpp"
#include "liftmc/samplers.hpp"

using namespace liftmc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw parse_error("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw parse_error("cannot write file '" + path + "'");
  out << content;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string tok(trim(comma == std::string::npos
                             ? std::string_view(text).substr(pos)
                             : std::string_view(text).substr(pos, comma - pos)));
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<int> resolve_context_vars(const Model& m,
                                      const std::vector<std::string>& names) {
  std::vector<int> ids;
  for (const std::string& name : names) ids.push_back(m.require_variable(name));
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct GenArgs {
  std::string family = "sports";
  std::string params_file;
  std::string out_base;
  double evidence_fraction = 0.0;
  uint64_t evidence_seed = 1;
};

int run_gen(const GenArgs& args) {
  ConfigSection params;
  if (!args.params_file.empty()) {
    auto sections = parse_config_sections(read_file(args.params_file));
    for (const ConfigSection& s : sections)
      if (s.header.empty() || s.header == "domain")
        for (const auto& kv : s.entries) params.entries.push_back(kv);
  }

  Domain domain;
  if (args.family == "sports") {
    SportsParams p;
    apply_sports_params(params, p);
    domain = gen_sports(p);
    std::cerr << "# family=sports num_students=" << p.num_students
              << " dorm_size=" << p.dorm_size << " group_size=" << p.group_size
              << " single_side=" << (p.single_side ? "true" : "false")
              << " seed=" << p.seed << "\n";
  } else if (args.family == "young_old") {
    YoungOldParams p;
    apply_young_old_params(params, p);
    domain = gen_young_old(p);
    std::cerr << "# family=young_old num_people=" << p.num_people
              << " single_side=" << (p.single_side ? "true" : "false")
              << " seed=" << p.seed << "\n";
  } else {
    throw config_error("unknown family '" + args.family + "'");
  }

  write_file(args.out_base + ".model", model_to_text(domain.model));
  std::string ctx;
  for (int v : domain.context_vars) ctx += domain.model.variable(v).name + "\n";
  write_file(args.out_base + ".ctxvars", ctx);
  std::cerr << "# wrote " << args.out_base << ".model ("
            << domain.model.num_variables() << " vars, "
            << domain.model.num_clauses() << " clauses) and " << args.out_base
            << ".ctxvars\n";

  if (args.evidence_fraction > 0) {
    Evidence e = random_evidence(domain.model, domain.context_vars,
                                 args.evidence_fraction, args.evidence_seed);
    write_file(args.out_base + ".evidence", assignment_to_text(e, domain.model));
    std::cerr << "# wrote " << args.out_base << ".evidence (" << e.size()
              << " bindings)\n";
  }
  return 0;
}

struct SymArgs {
  std::string model_file;
  std::string context_file;
  std::string evidence_file;
};

int run_symmetries(const SymArgs& args) {
  Model m = parse_model(read_file(args.model_file));
  Context context;
  if (!args.context_file.empty())
    context = parse_assignment(read_file(args.context_file), m);
  Evidence evidence;
  if (!args.evidence_file.empty())
    evidence = parse_assignment(read_file(args.evidence_file), m);

  std::cerr << "# model=" << args.model_file << " vars=" << m.num_variables()
            << " clauses=" << m.num_clauses()
            << " context_bindings=" << context.size()
            << " evidence_bindings=" << evidence.size() << "\n";

  PermGroup group = contextual_automorphisms(m, context, evidence);
  auto name = [&](int v) { return m.variable(v).name; };
  std::cout << "generators " << group.generators.size() << "\n";
  for (const Permutation& gen : group.generators)
    std::cout << cycle_notation(gen, name) << "\n";
  return 0;
}

struct SampleArgs {
  std::string model_file;
  std::string kind = "gibbs";
  double alpha = 0.0;
  std::string context_vars;  // comma-separated names
  std::string ctxvars_file;  // one name per line
  std::string evidence_file;
  uint64_t seed = 0;
  uint64_t steps = 0;
  double budget_seconds = 0.0;
  int schedule_points = 0;
  std::string clock = "virtual";
  double steps_per_second = 1e6;
  uint64_t burn_in = 0;
  std::string orbit_sampler = "pr";
  std::string out_file;
};

ChainConfig make_chain_config(const Model& m, const SampleArgs& args) {
  ChainConfig config;
  config.kind = chain_kind_from_string(args.kind);
  config.alpha = args.alpha;
  std::vector<std::string> names = split_csv(args.context_vars);
  if (!args.ctxvars_file.empty())
    for (std::string_view line : split_lines(read_file(args.ctxvars_file))) {
      std::string_view t = trim(line);
      if (!t.empty() && t[0] != '#') names.emplace_back(t);
    }
  config.context_vars = resolve_context_vars(m, names);
  if (!args.evidence_file.empty())
    config.evidence = parse_assignment(read_file(args.evidence_file), m);
  config.seed = args.seed;
  if (args.steps > 0) config.step_budget = args.steps;
  if (args.budget_seconds > 0) config.time_budget_seconds = args.budget_seconds;
  if (args.clock == "real") config.clock = ClockKind::real;
  else if (args.clock == "virtual") config.clock = ClockKind::virtual_steps;
  else throw config_error("clock must be real or virtual");
  config.steps_per_second = args.steps_per_second;
  config.burn_in_steps = args.burn_in;
  if (args.orbit_sampler == "pr")
    config.orbit_sampler = OrbitSamplerKind::product_replacement;
  else if (args.orbit_sampler == "exact")
    config.orbit_sampler = OrbitSamplerKind::exact_oracle;
  else throw config_error("orbit-sampler must be pr or exact");
  if (args.schedule_points > 0) {
    double budget =
        args.budget_seconds > 0
            ? args.budget_seconds
            : static_cast<double>(args.steps) / config.steps_per_second;
    for (int i = 1; i <= args.schedule_points; ++i)
      config.measure_at_seconds.push_back(budget * i / args.schedule_points);
  }
  config.validate(m);
  return config;
}

int run_sample(const SampleArgs& args) {
  if (args.steps == 0 && args.budget_seconds == 0)
    throw config_error("sample needs --steps and/or --budget-seconds");
  Model m = parse_model(read_file(args.model_file));
  ChainConfig config = make_chain_config(m, args);
  std::cerr << "# " << config_to_string(m, config) << "\n";

  SymmetryCache cache;
  const SymmetryCache* cache_ptr = nullptr;
  if (config.kind != ChainKind::gibbs) {
    std::vector<int> v = config.kind == ChainKind::con_mcmc
                             ? config.context_vars
                             : std::vector<int>{};
    cache = SymmetryCache::build(m, v, config.evidence);
    cache_ptr = &cache;
    std::cerr << "# symmetry_cache: " << cache.num_contexts() << " contexts, "
              << format_weight12(cache.build_seconds()) << "s\n";
  }

  RunRecord record = run_chain(m, config, cache_ptr);
  std::string csv = run_record_to_csv(m, config, record, 0);
  if (args.out_file.empty()) {
    std::cout << csv;
  } else {
    write_file(args.out_file, csv);
  }
  std::cerr << "# steps=" << record.steps
            << " ended_by=" << (record.ended_by_time ? "time" : "steps")
            << " sampling_seconds=" << format_weight12(record.sampling_seconds)
            << "\n";
  return 0;
}

struct BenchArgs {
  std::string spec_file;
  uint64_t seed = 0;
  std::string out_dir;
  int workers = 0;
  std::string sweep_axis;
  std::string sweep_values;
  std::string model_file;  // family = file domains
  std::string ctxvars_file;
};

void finish_file_domain(ExperimentSpec& spec, const BenchArgs& args) {
  if (spec.domain.family != DomainSpec::Family::file) return;
  if (args.model_file.empty())
    throw config_error("domain family 'file' needs --model");
  spec.domain.model_text = read_file(args.model_file);
  if (!args.ctxvars_file.empty())
    for (std::string_view line : split_lines(read_file(args.ctxvars_file))) {
      std::string_view t = trim(line);
      if (!t.empty() && t[0] != '#')
        spec.domain.context_var_names.emplace_back(t);
    }
}

int run_bench(const BenchArgs& args) {
  ExperimentSpec spec = parse_experiment_spec(read_file(args.spec_file));
  spec.seed = args.seed;
  if (args.workers > 0) spec.workers = args.workers;
  finish_file_domain(spec, args);

  std::filesystem::create_directories(args.out_dir);

  std::vector<SweepPoint> points;
  if (!args.sweep_axis.empty()) {
    std::vector<double> values;
    for (const std::string& v : split_csv(args.sweep_values))
      values.push_back(parse_double(v, "--values"));
    if (values.empty()) throw config_error("--sweep needs --values");
    points = expand_sweep(spec, sweep_axis_from_string(args.sweep_axis), values);
  } else {
    points.push_back(SweepPoint{0.0, spec});
  }

  std::string index = "point,name,runs_csv,summary_csv";
  for (const ChainSpec& c : spec.chains) index += ",final_kl_" + c.name;
  index += "\n";

  for (SweepPoint& point : points) {
    std::cerr << "# experiment " << point.spec.name
              << " repeats=" << point.spec.repeats
              << " budget=" << point.spec.budget_seconds << " clock="
              << (point.spec.clock == ClockKind::real ? "real" : "virtual")
              << " seed=" << point.spec.seed << "\n";
    ExperimentResult result = run_experiment(point.spec);
    std::string base = args.out_dir + "/" + point.spec.name;
    write_file(base + "_runs.csv", result.runs_csv);
    write_file(base + "_summary.csv", result.summary_csv);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", point.value);
    index += std::string(buf) + "," + point.spec.name + "," + point.spec.name +
             "_runs.csv," + point.spec.name + "_summary.csv";
    for (const ChainSpec& c : spec.chains) {
      std::snprintf(buf, sizeof(buf), "%.10g",
                    result.curve(c.name).final_mean());
      index += std::string(",") + buf;
    }
    index += "\n";
    for (const ChainCurve& curve : result.curves)
      std::cerr << "#   " << curve.name
                << ": final_kl=" << format_weight12(curve.final_mean())
                << " ci=[" << format_weight12(curve.final_ci_lo()) << ","
                << format_weight12(curve.final_ci_hi()) << "]\n";
  }
  write_file(args.out_dir + "/index.csv", index);
  return 0;
}

struct OracleArgs {
  std::string model_file;
  std::string evidence_file;
  bool distribution = false;
  bool stationarity = false;
  std::string kind = "con_mcmc";
  double alpha = 0.01;
  std::string context_vars;
  std::string ctxvars_file;
  double tolerance = 1e-10;
};

int run_oracle(const OracleArgs& args) {
  Model m = parse_model(read_file(args.model_file));
  Evidence evidence;
  if (!args.evidence_file.empty())
    evidence = parse_assignment(read_file(args.evidence_file), m);
  std::cerr << "# model=" << args.model_file << " vars=" << m.num_variables()
            << " clauses=" << m.num_clauses() << "\n";

  bool ok = true;
  if (args.distribution) {
    auto probs = exact_distribution(m, evidence);
    double sum = 0.0;
    for (double p : probs) sum += p;
    auto marg = marginals_of_distribution(probs, m.num_variables());
    for (int v = 0; v < m.num_variables(); ++v)
      std::cout << "marginal " << m.variable(v).name << " "
                << format_weight(marg[v]) << "\n";
    double residual = std::abs(sum - 1.0);
    std::cout << "normalization_residual " << format_weight(residual) << "\n";
    ok = ok && residual <= 1e-12;
  }

  if (args.stationarity) {
    SampleArgs chain_args;
    chain_args.kind = args.kind;
    chain_args.alpha = args.kind == "con_mcmc" ? args.alpha : 0.0;
    chain_args.context_vars = args.context_vars;
    chain_args.ctxvars_file = args.ctxvars_file;
    chain_args.orbit_sampler = "exact";
    chain_args.steps = 1;  // only the kernel is built
    ChainConfig config = make_chain_config(m, chain_args);
    config.evidence = evidence;
    config.validate(m);

    SymmetryCache cache;
    const SymmetryCache* cache_ptr = nullptr;
    if (config.kind != ChainKind::gibbs) {
      std::vector<int> v = config.kind == ChainKind::con_mcmc
                               ? config.context_vars
                               : std::vector<int>{};
      cache = SymmetryCache::build(m, v, evidence);
      cache_ptr = &cache;
    }
    TransitionMatrix t = exact_transition_matrix(m, config, cache_ptr);
    double row_residual = 0.0;
    for (size_t r = 0; r < t.dim; ++r)
      row_residual = std::max(row_residual, std::abs(t.row_sum(r) - 1.0));
    auto pi = exact_distribution(m, evidence);
    double residual = stationarity_residual(t, pi);
    std::cout << "row_sum_residual " << format_weight(row_residual) << "\n";
    std::cout << "stationarity_residual " << format_weight(residual) << "\n";
    ok = ok && residual <= args.tolerance && row_residual <= 1e-12;
  }

  if (!args.distribution && !args.stationarity)
    throw config_error("oracle needs --distribution and/or --stationarity");
  std::cout << (ok ? "ok" : "FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lifted MCMC engine with contextual symmetries"};
  app.name("liftmc");  // stable help text regardless of the invocation path
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a benchmark model file");
  gen->add_option("--family", gen_args.family,
                  "Domain family: sports or young_old")
      ->capture_default_str();
  gen->add_option("--params", gen_args.params_file, "key = value parameter file");
  gen->add_option("--out", gen_args.out_base,
                  "Output base path (writes <out>.model, <out>.ctxvars)")
      ->required();
  gen->add_option("--evidence-fraction", gen_args.evidence_fraction,
                  "Also write <out>.evidence with this fraction of variables")
      ->capture_default_str();
  gen->add_option("--evidence-seed", gen_args.evidence_seed,
                  "Seed for the evidence draw")
      ->capture_default_str();

  SymArgs sym_args;
  auto* sym = app.add_subcommand(
      "symmetries", "Print contextual symmetry generators in cycle notation");
  sym->add_option("--model", sym_args.model_file, "Model file")->required();
  sym->add_option("--context", sym_args.context_file,
                  "Context assignment file (<name>=0|1 lines)");
  sym->add_option("--evidence", sym_args.evidence_file,
                  "Evidence assignment file (<name>=0|1 lines)");

  SampleArgs sample_args;
  auto* sample =
      app.add_subcommand("sample", "Run one chain and write a RunRecord CSV");
  sample->add_option("--model", sample_args.model_file, "Model file")->required();
  sample->add_option("--kind", sample_args.kind,
                     "Chain kind: gibbs, orbital or con_mcmc")
      ->capture_default_str();
  sample->add_option("--alpha", sample_args.alpha,
                     "Context-flip probability (con_mcmc)")
      ->capture_default_str();
  sample->add_option("--context-vars", sample_args.context_vars,
                     "Comma-separated context variable names");
  sample->add_option("--ctxvars-file", sample_args.ctxvars_file,
                     "File with one context variable name per line");
  sample->add_option("--evidence", sample_args.evidence_file,
                     "Evidence assignment file");
  sample->add_option("--seed", sample_args.seed, "RNG seed")->required();
  sample->add_option("--steps", sample_args.steps, "Step budget");
  sample->add_option("--budget-seconds", sample_args.budget_seconds,
                     "Clock budget in seconds");
  sample->add_option("--schedule-points", sample_args.schedule_points,
                     "Number of evenly spaced measurements");
  sample->add_option("--clock", sample_args.clock,
                     "Clock kind: real or virtual (virtual is reproducible)")
      ->capture_default_str();
  sample->add_option("--steps-per-second", sample_args.steps_per_second,
                     "Virtual clock rate")
      ->capture_default_str();
  sample->add_option("--burn-in", sample_args.burn_in,
                     "Steps discarded before estimating marginals")
      ->capture_default_str();
  sample->add_option("--orbit-sampler", sample_args.orbit_sampler,
                     "Orbit draw: pr (product replacement) or exact")
      ->capture_default_str();
  sample->add_option("--out", sample_args.out_file,
                     "Output CSV path (stdout when omitted)");

  BenchArgs bench_args;
  auto* bench =
      app.add_subcommand("bench", "Run an experiment spec, optionally swept");
  bench->add_option("--spec", bench_args.spec_file, "Experiment spec file")
      ->required();
  bench->add_option("--seed", bench_args.seed, "Base RNG seed")->required();
  bench->add_option("--out", bench_args.out_dir, "Output directory")->required();
  bench->add_option("--workers", bench_args.workers,
                    "Parallel repeat workers (default: spec value)");
  bench->add_option("--sweep", bench_args.sweep_axis,
                    "Sweep axis: domain_size, evidence, posterior or alpha");
  bench->add_option("--values", bench_args.sweep_values,
                    "Comma-separated sweep values");
  bench->add_option("--model", bench_args.model_file,
                    "Model file for [domain] family = file");
  bench->add_option("--ctxvars-file", bench_args.ctxvars_file,
                    "Context variable names for family = file");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand(
      "oracle", "Exact enumeration checks: distribution and stationarity");
  oracle->add_option("--model", oracle_args.model_file, "Model file")->required();
  oracle->add_option("--evidence", oracle_args.evidence_file,
                     "Evidence assignment file");
  oracle->add_flag("--distribution", oracle_args.distribution,
                   "Print exact marginals and the normalization residual");
  oracle->add_flag("--stationarity", oracle_args.stationarity,
                   "Check pi P = pi for the exact chain kernel");
  oracle->add_option("--kind", oracle_args.kind, "Chain kind for --stationarity")
      ->capture_default_str();
  oracle->add_option("--alpha", oracle_args.alpha, "Alpha for con_mcmc")
      ->capture_default_str();
  oracle->add_option("--context-vars", oracle_args.context_vars,
                     "Comma-separated context variable names");
  oracle->add_option("--ctxvars-file", oracle_args.ctxvars_file,
                     "File with one context variable name per line");
  oracle->add_option("--tolerance", oracle_args.tolerance,
                     "Stationarity residual tolerance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return run_gen(gen_args);
    if (sym->parsed()) return run_symmetries(sym_args);
    if (sample->parsed()) return run_sample(sample_args);
    if (bench->parsed()) return run_bench(bench_args);
    if (oracle->parsed()) return run_oracle(oracle_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every other flag-level problem is a usage error
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
