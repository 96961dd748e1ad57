#include <map>
#include <set>

#include "doctest.h"
#include "liftmc/autgroup.hpp"
#include "liftmc/colorgraph.hpp"
#include "liftmc/domains.hpp"
#include "liftmc/permgroup.hpp"
#include "test_util.hpp"

using namespace liftmc;

namespace {

Permutation swap_perm(int n, int a, int b) {
  std::vector<int> im(n);
  for (int i = 0; i < n; ++i) im[i] = i;
  std::swap(im[a], im[b]);
  return Permutation(std::move(im));
}

}  // namespace

TEST_CASE("apply: identity, swap, inverse law") {
  State s(2);
  s.set(0, 1);
  CHECK(apply(Permutation::identity(2), s) == s);

  State swapped = apply(swap_perm(2, 0, 1), s);
  CHECK(swapped[0] == 0);
  CHECK(swapped[1] == 1);

  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng.uniform_int(6));
    // random permutation
    std::vector<int> im(n);
    for (int i = 0; i < n; ++i) im[i] = i;
    for (int i = n - 1; i > 0; --i)
      std::swap(im[i], im[rng.uniform_int(i + 1)]);
    Permutation theta(im);
    State t(n);
    for (int i = 0; i < n; ++i) t.set(i, rng.coin());
    CHECK(apply(theta, apply(theta.inverse(), t)) == t);
  }

  CHECK_THROWS_AS(apply(Permutation::identity(3), State(2)), dimension_error);
}

TEST_CASE("orbit: trivial group, single swap, consistency filter") {
  State s(3);
  s.set(0, 1);
  s.set(2, 1);

  PermGroup trivial = PermGroup::trivial(3);
  auto orb = orbit(trivial, s);
  REQUIRE(orb.size() == 1);
  CHECK(orb[0] == s);

  // <A<->B> with G fixed: 110 -> {110, 011}? ids: A=0, B=1, G=2
  PermGroup g;
  g.degree = 3;
  g.generators = {swap_perm(3, 0, 1)};
  g.fixed_set = {2};
  auto orb2 = orbit(g, s);
  CHECK(orb2.size() == 2);
  std::set<uint64_t> indices;
  for (const State& x : orb2) indices.insert(x.to_index());
  CHECK(indices == std::set<uint64_t>{s.to_index(),
                                      State::from_index(3, 0b110).to_index()});
  for (const State& x : orb2) CHECK(x[2] == 1);

  // inconsistent with the context -> empty orbit by definition
  Context ctx;
  ctx.bind(2, 0);
  CHECK(orbit(g, s, ctx).empty());
}

TEST_CASE("orbit size C(5,2) on the one-group sports instance") {
  SportsParams params;
  params.num_students = 5;
  params.dorm_size = 5;
  params.group_size = 5;
  Domain d = gen_sports(params);
  int sport = d.context_vars.front();

  Context tennis;
  tennis.bind(sport, 1);
  PermGroup group = contextual_automorphisms(d.model, tennis, {});

  State s(d.model.num_variables());
  s.set(sport, 1);
  s.set(d.model.require_variable("S_0"), 1);
  s.set(d.model.require_variable("S_1"), 1);
  auto orb = orbit(group, s, tennis);
  CHECK(orb.size() == 10);
  for (const State& x : orb) CHECK(consistent(x, tennis));
}

TEST_CASE("orbit cap raises a resource error") {
  // full symmetric group on 20 points via adjacent transpositions
  PermGroup g;
  g.degree = 20;
  for (int i = 0; i + 1 < 20; ++i)
    g.generators.push_back(swap_perm(20, i, i + 1));
  State s(20);
  for (int i = 0; i < 10; ++i) s.set(i, 1);
  // orbit is C(20,10) = 184756 > 2^16
  CHECK_THROWS_AS(orbit(g, s), resource_error);
}

TEST_CASE("closure satisfies the group axioms on small groups") {
  PermGroup g;
  g.degree = 3;
  g.generators = {swap_perm(3, 0, 1), swap_perm(3, 1, 2)};
  auto all = closure(g);
  CHECK(all.size() == 6);  // S_3
  std::set<Permutation> set(all.begin(), all.end());
  CHECK(set.count(Permutation::identity(3)) == 1);
  for (const Permutation& p : all) {
    CHECK(set.count(p.inverse()) == 1);
    for (const Permutation& q : all) CHECK(set.count(p * q) == 1);
  }
}

TEST_CASE("pr_step: trivial and single-generator groups") {
  PrSampler trivial(PermGroup::trivial(4), 1);
  CHECK(trivial.step().is_identity());

  PermGroup z2;
  z2.degree = 2;
  z2.generators = {swap_perm(2, 0, 1)};
  PrSampler pr(z2, 99);
  int swaps = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    if (!pr.step().is_identity()) ++swaps;
  double freq = static_cast<double>(swaps) / draws;
  CHECK(freq > 0.4);
  CHECK(freq < 0.6);
}

TEST_CASE("pr_step reaches every element of S_3") {
  PermGroup g;
  g.degree = 3;
  g.generators = {swap_perm(3, 0, 1), swap_perm(3, 1, 2)};
  PrSampler pr(g, 7);
  std::set<Permutation> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(pr.step());
  CHECK(seen.size() == 6);
}

TEST_CASE("sample_orbit stays in the orbit and splits evenly for a swap") {
  PermGroup g;
  g.degree = 3;
  g.generators = {swap_perm(3, 0, 1)};
  g.fixed_set = {2};
  State s(3);
  s.set(0, 1);
  s.set(2, 1);
  Context ctx;
  ctx.bind(2, 1);

  PrSampler pr(g, 4242);
  int first = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    State t = sample_orbit(g, s, pr);
    CHECK(consistent(t, ctx));
    if (t == s) ++first;
  }
  double freq = static_cast<double>(first) / draws;
  CHECK(freq > 0.4);
  CHECK(freq < 0.6);
}

TEST_CASE("exact_uniform_orbit_sample is uniform (chi-square) and on-support") {
  // S_5 acting on students; orbit of a 2-of-5 state has size 10
  PermGroup g;
  g.degree = 5;
  for (int i = 0; i + 1 < 5; ++i)
    g.generators.push_back(swap_perm(5, i, i + 1));
  State s(5);
  s.set(0, 1);
  s.set(1, 1);

  auto orb = orbit(g, s);
  REQUIRE(orb.size() == 10);
  std::set<uint64_t> support;
  for (const State& x : orb) support.insert(x.to_index());

  Rng rng(31337);
  std::map<uint64_t, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    State t = exact_uniform_orbit_sample(g, s, rng);
    CHECK(support.count(t.to_index()) == 1);
    counts[t.to_index()]++;
  }
  REQUIRE(counts.size() == 10);
  double chi2 = 0.0;
  double expected = draws / 10.0;
  for (const auto& [idx, c] : counts)
    chi2 += (c - expected) * (c - expected) / expected;
  // chi-square df=9, p=0.01 critical value
  CHECK(chi2 < 21.666);
}

TEST_CASE("singleton orbit sample returns the state") {
  PermGroup trivial = PermGroup::trivial(3);
  Rng rng(1);
  State s(3);
  s.set(1, 1);
  CHECK(exact_uniform_orbit_sample(trivial, s, rng) == s);
}

TEST_CASE("orbits of two states coincide or are disjoint") {
  PermGroup g;
  g.degree = 4;
  g.generators = {swap_perm(4, 0, 1), swap_perm(4, 2, 3)};
  for (uint64_t a = 0; a < 16; ++a)
    for (uint64_t b = 0; b < 16; ++b) {
      auto orb_a = orbit(g, State::from_index(4, a));
      auto orb_b = orbit(g, State::from_index(4, b));
      std::set<uint64_t> sa, sb;
      for (const State& x : orb_a) sa.insert(x.to_index());
      for (const State& x : orb_b) sb.insert(x.to_index());
      std::vector<uint64_t> inter;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                            std::back_inserter(inter));
      CHECK((inter.empty() || sa == sb));
    }
}

TEST_CASE("cycle notation") {
  CHECK(cycle_notation(Permutation::identity(4)) == "()");
  CHECK(cycle_notation(swap_perm(4, 1, 3)) == "(1 3)");
  Permutation rot({1, 2, 0});
  CHECK(cycle_notation(rot) == "(0 1 2)");
  auto name = [](int i) { return std::string(1, static_cast<char>('a' + i)); };
  CHECK(cycle_notation(rot, name) == "(a b c)");
}
