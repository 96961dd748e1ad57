#pragma once

#include <map>
#include <string>
#include <vector>

#include "liftmc/bench.hpp"
#include "liftmc/common.hpp"
#include "liftmc/domains.hpp"

namespace liftmc {

// key = value files with optional [section] headers. Repeated sections of
// the same name are kept in order (used for [chain <name>] blocks).
struct ConfigSection {
  std::string header;  // "" for the leading unsectioned block
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  double get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    return v ? parse_double(*v, "key '" + key + "'") : fallback;
  }

  int get_int(const std::string& key, int fallback) const {
    return static_cast<int>(get_double(key, fallback));
  }

  uint64_t get_u64(const std::string& key, uint64_t fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    try {
      return std::stoull(*v);
    } catch (...) {
      throw parse_error("key '" + key + "' is not an unsigned integer");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw parse_error("key '" + key + "' must be true/false");
  }
};

inline std::vector<ConfigSection> parse_config_sections(std::string_view text) {
  std::vector<ConfigSection> sections;
  sections.push_back(ConfigSection{});
  int lineno = 0;
  for (std::string_view raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw parse_error("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      sections.push_back(
          ConfigSection{std::string(trim(line.substr(1, line.size() - 2))), {}});
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw parse_error("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw parse_error("config line " + std::to_string(lineno) + ": empty key");
    sections.back().entries.emplace_back(std::move(key), std::move(value));
  }
  return sections;
}

inline void apply_sports_params(const ConfigSection& s, SportsParams& p) {
  p.num_students = s.get_int("num_students", p.num_students);
  p.dorm_size = s.get_int("dorm_size", p.dorm_size);
  p.group_size = s.get_int("group_size", p.group_size);
  p.single_side = s.get_bool("single_side", p.single_side);
  p.seed = s.get_u64("seed", p.seed);
  p.sport_prior = s.get_double("sport_prior", p.sport_prior);
  p.singles_prior = s.get_double("singles_prior", p.singles_prior);
  p.doubles_prior = s.get_double("doubles_prior", p.doubles_prior);
  p.doubles_coupling = s.get_double("doubles_coupling", p.doubles_coupling);
  p.tennis_group_base = s.get_double("tennis_group_base", p.tennis_group_base);
  p.badminton_group_base =
      s.get_double("badminton_group_base", p.badminton_group_base);
  p.group_weight_step = s.get_double("group_weight_step", p.group_weight_step);
  p.perturbation_sigma =
      s.get_double("perturbation_sigma", p.perturbation_sigma);
  p.single_badminton_prior =
      s.get_double("single_badminton_prior", p.single_badminton_prior);
}

inline void apply_young_old_params(const ConfigSection& s, YoungOldParams& p) {
  p.num_people = s.get_int("num_people", p.num_people);
  p.single_side = s.get_bool("single_side", p.single_side);
  p.seed = s.get_u64("seed", p.seed);
  p.young_prior = s.get_double("young_prior", p.young_prior);
  p.young_smokes = s.get_double("young_smokes", p.young_smokes);
  p.old_not_smokes = s.get_double("old_not_smokes", p.old_not_smokes);
  p.young_eats_out = s.get_double("young_eats_out", p.young_eats_out);
  p.old_not_eats_out = s.get_double("old_not_eats_out", p.old_not_eats_out);
  p.smoking_causes_cancer =
      s.get_double("smoking_causes_cancer", p.smoking_causes_cancer);
  p.friends_similar_smoking =
      s.get_double("friends_similar_smoking", p.friends_similar_smoking);
  p.cancer_prior = s.get_double("cancer_prior", p.cancer_prior);
  p.friends_prior = s.get_double("friends_prior", p.friends_prior);
  p.gaussian_sigma = s.get_double("gaussian_sigma", p.gaussian_sigma);
}

inline DomainSpec parse_domain_section(const ConfigSection& s) {
  DomainSpec d;
  std::string family = s.get("family", "sports");
  if (family == "sports") {
    d.family = DomainSpec::Family::sports;
    apply_sports_params(s, d.sports);
  } else if (family == "young_old") {
    d.family = DomainSpec::Family::young_old;
    apply_young_old_params(s, d.young_old);
  } else if (family == "file") {
    d.family = DomainSpec::Family::file;
    // model_text and context names are resolved by the caller (paths)
  } else {
    throw parse_error("unknown domain family '" + family + "'");
  }
  return d;
}

// Experiment spec file: an [experiment] section, a [domain] section and one
// [chain <name>] section per compared sampler.
inline ExperimentSpec parse_experiment_spec(std::string_view text) {
  ExperimentSpec spec;
  bool have_domain = false;
  for (const ConfigSection& s : parse_config_sections(text)) {
    if (s.header.empty()) {
      if (!s.entries.empty())
        throw parse_error("experiment spec keys must live in a section");
      continue;
    }
    if (s.header == "experiment") {
      spec.name = s.get("name", spec.name);
      spec.repeats = s.get_int("repeats", spec.repeats);
      spec.seed = s.get_u64("seed", spec.seed);
      spec.budget_seconds = s.get_double("budget_seconds", spec.budget_seconds);
      spec.schedule_points = s.get_int("schedule_points", spec.schedule_points);
      std::string clock = s.get("clock", "real");
      if (clock == "real") spec.clock = ClockKind::real;
      else if (clock == "virtual") spec.clock = ClockKind::virtual_steps;
      else throw parse_error("clock must be real or virtual");
      spec.steps_per_second =
          s.get_double("steps_per_second", spec.steps_per_second);
      spec.evidence_fraction =
          s.get_double("evidence_fraction", spec.evidence_fraction);
      spec.evidence_seed = s.get_u64("evidence_seed", spec.evidence_seed);
      std::string mode = s.get("truth_mode", "exact");
      if (mode == "exact") spec.truth.mode = TruthSpec::Mode::exact;
      else if (mode == "reference") spec.truth.mode = TruthSpec::Mode::reference;
      else throw parse_error("truth_mode must be exact or reference");
      spec.truth.steps = s.get_u64("truth_steps", spec.truth.steps);
      spec.truth.seed = s.get_u64("truth_seed", spec.truth.seed);
      spec.truth.burn_in_fraction =
          s.get_double("truth_burn_in", spec.truth.burn_in_fraction);
      spec.workers = s.get_int("workers", spec.workers);
    } else if (s.header == "domain") {
      spec.domain = parse_domain_section(s);
      have_domain = true;
    } else if (s.header.rfind("chain", 0) == 0) {
      ChainSpec c;
      c.name = std::string(trim(std::string_view(s.header).substr(5)));
      if (c.name.empty())
        throw parse_error("chain section needs a name: [chain <name>]");
      c.kind = chain_kind_from_string(s.get("kind", "gibbs"));
      c.alpha = s.get_double("alpha", 0.0);
      std::string sampler = s.get("orbit_sampler", "pr");
      if (sampler == "pr") c.orbit_sampler = OrbitSamplerKind::product_replacement;
      else if (sampler == "exact") c.orbit_sampler = OrbitSamplerKind::exact_oracle;
      else throw parse_error("orbit_sampler must be pr or exact");
      spec.chains.push_back(std::move(c));
    } else {
      throw parse_error("unknown section [" + s.header + "]");
    }
  }
  if (!have_domain) throw parse_error("experiment spec needs a [domain] section");
  return spec;
}

}  // namespace liftmc
