#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "liftmc/common.hpp"
#include "liftmc/model.hpp"
#include "liftmc/rng.hpp"

namespace liftmc {

// A generated benchmark instance: the model plus the designated context
// variable set V (ids into the model).
struct Domain {
  Model model;
  std::vector<int> context_vars;
};

namespace detail {

// Weights pass through their 12-digit decimal form so the in-memory model
// and the serialized file carry bit-identical doubles, and intended weight
// equalities are exact.
inline double canon12(double w) {
  return parse_double(format_weight12(w), "generated weight");
}

// Jittered weights must stay pairwise distinct after rounding or the color
// construction would merge clauses that are meant to differ.
class DistinctJitter {
 public:
  explicit DistinctJitter(Rng& rng, double sigma) : rng_(rng), sigma_(sigma) {}
  double draw(double base) {
    for (;;) {
      double w = canon12(base + sigma_ * rng_.gaussian());
      if (seen_.insert(format_weight12(w)).second) return w;
    }
  }

  // A batch around `base` whose deviations sum to zero, so a jittered rule
  // family shifts no probability mass between the two context sides; only
  // the within-family differences (which break the symmetry) remain.
  std::vector<double> draw_centered(double base, int count) {
    for (;;) {
      std::vector<double> raw(count);
      double mean = 0.0;
      for (double& x : raw) {
        x = sigma_ * rng_.gaussian();
        mean += x;
      }
      mean /= count;
      std::vector<double> out;
      std::unordered_set<std::string> batch;
      bool distinct = true;
      for (double x : raw) {
        double w = canon12(base + x - mean);
        if (!batch.insert(format_weight12(w)).second ||
            seen_.count(format_weight12(w))) {
          distinct = false;
          break;
        }
        out.push_back(w);
      }
      if (!distinct) continue;
      for (double w : out) seen_.insert(format_weight12(w));
      return out;
    }
  }

 private:
  Rng& rng_;
  double sigma_;
  std::unordered_set<std::string> seen_;
};

inline std::vector<int> shuffled(int n, Rng& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(i + 1)]);
  return order;
}

}  // namespace detail

// --- Sports Network ----------------------------------------------------------
//
// Students may enter a league for one of two sports (variable Sport;
// 1 = tennis, 0 = badminton). S_i: student i plays singles. D_i_j: same-dorm
// students i and j team up for doubles. Per-sport training groups couple the
// singles variables of their members; the two sports use different
// partitions of each dorm into groups. Playing singles makes a doubles
// team-up more likely regardless of groups.

struct SportsParams {
  int num_students = 25;
  int dorm_size = 25;
  int group_size = 5;
  bool single_side = false;
  uint64_t seed = 1;

  double sport_prior = 0.25;        // (Sport) — tunes the context posterior
  double singles_prior = -12.0;     // (S_i), shared
  double doubles_prior = -2.5;      // (D_i_j), shared
  double doubles_coupling = 0.8;    // (!S_i | !S_j | D_i_j), shared
  double tennis_group_base = 24.0;  // group weight = base + index * step
  double badminton_group_base = 23.6;
  double group_weight_step = 0.1;
  // Single variant: badminton loses its group structure and every student
  // instead behaves individually, with a per-student jittered prior.
  double perturbation_sigma = 1.0;
  double single_badminton_prior = 11.5;  // vs singles_prior, per student

  void validate() const {
    if (num_students <= 0) throw config_error("num_students must be positive");
    if (group_size <= 0 || dorm_size % group_size != 0)
      throw config_error("dorm_size must be divisible by group_size");
    if (num_students > dorm_size && num_students % dorm_size != 0)
      throw config_error("num_students must be a multiple of dorm_size");
    if (num_students < dorm_size && num_students % group_size != 0)
      throw config_error("num_students must be a multiple of group_size");
    if (perturbation_sigma < 0) throw config_error("negative sigma");
  }
};

inline Domain gen_sports(const SportsParams& params) {
  params.validate();
  using detail::canon12;
  Rng rng(derive_seed(params.seed, 17));

  Domain d;
  Model& m = d.model;
  int sport = m.add_variable("Sport");
  d.context_vars = {sport};

  int n = params.num_students;
  std::vector<int> s_var(n);
  for (int i = 0; i < n; ++i)
    s_var[i] = m.add_variable("S_" + std::to_string(i));

  int dorm_size = std::min(params.dorm_size, n);
  int num_dorms = (n + dorm_size - 1) / dorm_size;

  std::vector<std::vector<int>> dorm_members(num_dorms);
  for (int i = 0; i < n; ++i) dorm_members[i / dorm_size].push_back(i);

  // Doubles variables per same-dorm pair.
  std::vector<std::vector<std::pair<std::pair<int, int>, int>>> dorm_pairs(
      num_dorms);
  for (int dd = 0; dd < num_dorms; ++dd)
    for (size_t a = 0; a < dorm_members[dd].size(); ++a)
      for (size_t b = a + 1; b < dorm_members[dd].size(); ++b) {
        int i = dorm_members[dd][a], j = dorm_members[dd][b];
        int v = m.add_variable("D_" + std::to_string(i) + "_" +
                               std::to_string(j));
        dorm_pairs[dd].push_back({{i, j}, v});
      }

  m.add_clause({{sport, true}}, canon12(params.sport_prior));
  for (int i = 0; i < n; ++i)
    m.add_clause({{s_var[i], true}}, canon12(params.singles_prior));

  // Training groups: within each dorm, tennis groups are the rows of a
  // seed-shuffled layout and badminton groups the columns (grid when the
  // dorm is a perfect square of the group size, so no pair shares both
  // groups); otherwise a second independent shuffle.
  //
  // One "somebody in the group plays" clause per group. Against the
  // negative singles prior this pins each group's head count; moving the
  // spot to another member needs an improbable two-flip excursion, which
  // is exactly the direction orbit moves shortcut. A group-level clause
  // (rather than pairwise ones) also keeps the Sport conditional mild, so
  // chains actually cross between the two sports.
  int group_index = 0;
  auto add_group_couplings = [&](const std::vector<int>& members,
                                 bool tennis) {
    double w = canon12((tennis ? params.tennis_group_base
                               : params.badminton_group_base) +
                       params.group_weight_step * group_index);
    ++group_index;
    // sport literal satisfied on the other side, so the coupling only
    // shapes its own side's conditional distribution
    std::vector<Literal> lits;
    lits.push_back({sport, !tennis});
    for (int member : members) lits.push_back({s_var[member], true});
    m.add_clause(std::move(lits), w);
  };

  for (int dd = 0; dd < num_dorms; ++dd) {
    const std::vector<int>& members = dorm_members[dd];
    int sz = static_cast<int>(members.size());
    int g = params.group_size;
    int rows = sz / g;

    std::vector<int> tennis_order = detail::shuffled(sz, rng);
    for (int r = 0; r < rows; ++r) {
      std::vector<int> grp;
      for (int c = 0; c < g; ++c) grp.push_back(members[tennis_order[r * g + c]]);
      add_group_couplings(grp, true);
    }

    if (params.single_side) continue;  // badminton has no groups there

    if (rows == g) {
      for (int c = 0; c < g; ++c) {
        std::vector<int> grp;
        for (int r = 0; r < rows; ++r)
          grp.push_back(members[tennis_order[r * g + c]]);
        add_group_couplings(grp, false);
      }
    } else {
      std::vector<int> badminton_order = detail::shuffled(sz, rng);
      for (int r = 0; r < rows; ++r) {
        std::vector<int> grp;
        for (int c = 0; c < g; ++c)
          grp.push_back(members[badminton_order[r * g + c]]);
        add_group_couplings(grp, false);
      }
    }
  }

  for (int dd = 0; dd < num_dorms; ++dd)
    for (const auto& [pair, v] : dorm_pairs[dd]) {
      m.add_clause({{s_var[pair.first], false}, {s_var[pair.second], false},
                    {v, true}},
                   canon12(params.doubles_coupling));
      m.add_clause({{v, true}}, canon12(params.doubles_prior));
    }

  if (params.single_side) {
    // On the badminton side every student behaves individually: a
    // per-student prior with a small jitter replaces the group coupling,
    // so symmetries survive only under Sport = tennis, the badminton side
    // mixes fast, and states reachable on one side stay plausible exits
    // toward the other.
    detail::DistinctJitter jitter(rng, params.perturbation_sigma);
    std::vector<double> w =
        jitter.draw_centered(params.single_badminton_prior, n);
    for (int i = 0; i < n; ++i)
      m.add_clause({{sport, true}, {s_var[i], true}}, w[i]);
  }

  return d;
}

// --- Young and Old -----------------------------------------------------------
//
// A population-wide IsYoung switch. Young people are more likely to smoke
// (shared weight) and to eat out (individually jittered weight); old people
// are less likely to smoke (jittered) and to eat out (shared, jittered in
// the Single variant). Smoking causes cancer, friends have similar smoking
// habits, and cancer/friends have low priors.

struct YoungOldParams {
  int num_people = 10;
  bool single_side = false;
  uint64_t seed = 1;

  double young_prior = 0.0;          // (IsYoung) — tunes the context posterior
  double young_smokes = 0.9;         // (!IsYoung | Smokes_p), shared
  double old_not_smokes = 0.8;       // (IsYoung | !Smokes_p), jittered
  double young_eats_out = 0.7;       // (!IsYoung | EatsOut_p), jittered
  double old_not_eats_out = 0.65;    // (IsYoung | !EatsOut_p), shared unless Single
  double smoking_causes_cancer = 1.0;
  double friends_similar_smoking = 0.6;
  double cancer_prior = -1.4;
  double friends_prior = -1.6;
  double gaussian_sigma = 0.05;

  void validate() const {
    if (num_people <= 0) throw config_error("num_people must be positive");
    if (gaussian_sigma < 0) throw config_error("negative sigma");
  }
};

inline Domain gen_young_old(const YoungOldParams& params) {
  params.validate();
  using detail::canon12;
  Rng rng(derive_seed(params.seed, 23));

  Domain d;
  Model& m = d.model;
  int young = m.add_variable("IsYoung");
  d.context_vars = {young};

  int n = params.num_people;
  std::vector<int> smokes(n), cancer(n), eats(n);
  for (int p = 0; p < n; ++p) smokes[p] = m.add_variable("Smokes_" + std::to_string(p));
  for (int p = 0; p < n; ++p) cancer[p] = m.add_variable("Cancer_" + std::to_string(p));
  for (int p = 0; p < n; ++p) eats[p] = m.add_variable("EatsOut_" + std::to_string(p));
  std::vector<std::vector<int>> friends(n, std::vector<int>(n, -1));
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      friends[p][q] = m.add_variable("Friends_" + std::to_string(p) + "_" +
                                     std::to_string(q));

  m.add_clause({{young, true}}, canon12(params.young_prior));

  detail::DistinctJitter jitter(rng, params.gaussian_sigma);
  std::vector<double> old_smoke_w =
      jitter.draw_centered(params.old_not_smokes, n);
  std::vector<double> young_eats_w =
      jitter.draw_centered(params.young_eats_out, n);
  std::vector<double> old_eats_w;
  if (params.single_side)
    old_eats_w = jitter.draw_centered(params.old_not_eats_out, n);

  for (int p = 0; p < n; ++p)
    m.add_clause({{young, false}, {smokes[p], true}},
                 canon12(params.young_smokes));
  for (int p = 0; p < n; ++p)
    m.add_clause({{young, true}, {smokes[p], false}}, old_smoke_w[p]);
  for (int p = 0; p < n; ++p)
    m.add_clause({{young, false}, {eats[p], true}}, young_eats_w[p]);
  for (int p = 0; p < n; ++p)
    m.add_clause({{young, true}, {eats[p], false}},
                 params.single_side ? old_eats_w[p]
                                    : canon12(params.old_not_eats_out));

  for (int p = 0; p < n; ++p)
    m.add_clause({{smokes[p], false}, {cancer[p], true}},
                 canon12(params.smoking_causes_cancer));
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      int f = friends[p][q];
      m.add_clause({{f, false}, {smokes[p], false}, {smokes[q], true}},
                   canon12(params.friends_similar_smoking));
      m.add_clause({{f, false}, {smokes[p], true}, {smokes[q], false}},
                   canon12(params.friends_similar_smoking));
    }
  for (int p = 0; p < n; ++p)
    m.add_clause({{cancer[p], true}}, canon12(params.cancer_prior));
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      m.add_clause({{friends[p][q], true}}, canon12(params.friends_prior));

  return d;
}

}  // namespace liftmc
