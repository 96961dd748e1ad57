#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "liftmc/common.hpp"
#include "liftmc/model.hpp"
#include "liftmc/rng.hpp"

namespace liftmc {

// A bijection on 0..n-1; image()[i] is where i maps to.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
#ifndef NDEBUG
    std::vector<char> hit(image_.size(), 0);
    for (int x : image_) {
      if (x < 0 || x >= static_cast<int>(image_.size()) || hit[x])
        throw config_error("permutation image is not a bijection");
      hit[x] = 1;
    }
#endif
  }

  static Permutation identity(int n) {
    std::vector<int> im(n);
    for (int i = 0; i < n; ++i) im[i] = i;
    return Permutation(std::move(im));
  }

  int degree() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[i]; }
  const std::vector<int>& image() const { return image_; }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (image_[i] != i) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<int> inv(image_.size());
    for (int i = 0; i < degree(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
  }

  // Function composition: (a * b)(x) = a(b(x)), b applied first.
  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.degree() != b.degree())
      throw dimension_error("permutation degree mismatch in composition");
    std::vector<int> im(a.degree());
    for (int i = 0; i < a.degree(); ++i) im[i] = a.image_[b.image_[i]];
    return Permutation(std::move(im));
  }

  bool operator==(const Permutation& o) const { return image_ == o.image_; }
  bool operator!=(const Permutation& o) const { return image_ != o.image_; }
  bool operator<(const Permutation& o) const { return image_ < o.image_; }

  uint64_t hash() const {
    return fnv1a_bytes(kFnvOffset, image_.data(), image_.size() * sizeof(int));
  }

  // Alloc-free swap used by the sampler hot loop; the caller supplies a
  // valid bijection (products of bijections need no re-check).
  void swap_image(std::vector<int>& other) { image_.swap(other); }

 private:
  std::vector<int> image_;
};

struct PermutationHash {
  uint64_t operator()(const Permutation& p) const { return p.hash(); }
};

// Transport each variable's value along the permutation:
// result[theta(i)] = state[i].
inline State apply(const Permutation& theta, const State& s) {
  if (theta.degree() != s.size())
    throw dimension_error("permutation degree does not match state length");
  State out(s.size());
  for (int i = 0; i < s.size(); ++i) out.set(theta(i), s[i]);
  return out;
}

// In-place variant used by the samplers' hot loop; scratch must have the
// same length as state.
inline void apply_into(const Permutation& theta, const State& s, State& out) {
  for (int i = 0; i < s.size(); ++i) out.set(theta(i), s[i]);
}

// Finitely generated permutation group. Generators exclude the identity;
// every generator fixes fixed_set pointwise (the context and evidence
// variables for contextual groups).
struct PermGroup {
  int degree = 0;
  std::vector<Permutation> generators;
  std::vector<int> fixed_set;  // sorted variable ids

  static PermGroup trivial(int n) { return PermGroup{n, {}, {}}; }

  bool is_trivial() const { return generators.empty(); }

  void check_invariants() const {
    for (const Permutation& g : generators) {
      if (g.degree() != degree)
        throw config_error("generator degree mismatch");
      if (g.is_identity())
        throw config_error("identity listed as a generator");
      for (int v : fixed_set)
        if (g(v) != v)
          throw config_error("generator moves a fixed-set variable");
    }
  }
};

constexpr size_t kDefaultOrbitCap = 1u << 16;

// Contextual orbit: closure of state under the generators, restricted by
// definition to states consistent with the context. A state inconsistent
// with the context has an empty orbit. Generators fix the context
// variables, so consistency is preserved along the BFS (asserted).
inline std::vector<State> orbit(const PermGroup& g, const State& start,
                                const Context& context = {},
                                size_t cap = kDefaultOrbitCap) {
  for (const Binding& b : context.bindings())
    if (std::find(g.fixed_set.begin(), g.fixed_set.end(), b.var) ==
        g.fixed_set.end())
      throw config_error("orbit context variable not fixed by the group");
  if (!consistent(start, context)) return {};

  std::vector<State> out;
  std::unordered_set<State, StateHash> seen;
  std::deque<State> frontier;
  seen.insert(start);
  frontier.push_back(start);
  out.push_back(start);
  while (!frontier.empty()) {
    State s = std::move(frontier.front());
    frontier.pop_front();
    for (const Permutation& gen : g.generators) {
      State t = apply(gen, s);
      if (seen.insert(t).second) {
        if (!consistent(t, context))
          throw config_error("orbit left the context despite fixed_set");
        if (out.size() >= cap)
          throw resource_error("orbit size cap exceeded (" +
                               std::to_string(cap) + ")");
        out.push_back(t);
        frontier.push_back(t);
      }
    }
  }
  return out;
}

// Materialized group closure; test/oracle machinery, exponential in general.
inline std::vector<Permutation> closure(const PermGroup& g,
                                        size_t cap = 1u << 20) {
  std::vector<Permutation> out;
  std::unordered_set<Permutation, PermutationHash> seen;
  std::deque<Permutation> frontier;
  Permutation id = Permutation::identity(g.degree);
  seen.insert(id);
  frontier.push_back(id);
  out.push_back(id);
  while (!frontier.empty()) {
    Permutation p = std::move(frontier.front());
    frontier.pop_front();
    for (const Permutation& gen : g.generators) {
      Permutation q = gen * p;
      if (seen.insert(q).second) {
        if (out.size() >= cap)
          throw resource_error("group closure cap exceeded");
        out.push_back(q);
        frontier.push_back(q);
      }
    }
  }
  return out;
}

inline bool group_contains(const PermGroup& g, const Permutation& p,
                           size_t cap = 1u << 20) {
  for (const Permutation& q : closure(g, cap))
    if (q == p) return true;
  return false;
}

// Product-replacement random walk over generating tuples (Pak-style).
// Draws are only approximately uniform over the group; exactness claims
// live with exact_uniform_orbit_sample instead.
class PrSampler {
 public:
  static constexpr int kDefaultSlots = 10;
  static constexpr int kDefaultBurnIn = 50;

  PrSampler() = default;

  PrSampler(const PermGroup& group, uint64_t seed,
            int slots = kDefaultSlots, int burn_in = kDefaultBurnIn)
      : degree_(group.degree), rng_(seed) {
    if (!group.generators.empty()) {
      // every generator must appear or the slot tuple could generate a
      // proper subgroup
      size_t count = std::max<size_t>(slots, group.generators.size());
      slots_.reserve(count);
      for (size_t i = 0; i < count; ++i)
        slots_.push_back(group.generators[i % group.generators.size()]);
      for (int i = 0; i < burn_in; ++i) step();
    }
  }

  bool trivial() const { return slots_.empty(); }

  // One replacement: slot_i <- slot_i * slot_j or slot_j * slot_i, i != j;
  // returns the new slot_i. Products of generators stay in the group.
  const Permutation& step() {
    if (slots_.empty()) {
      if (identity_.degree() != degree_) identity_ = Permutation::identity(degree_);
      return identity_;
    }
    if (slots_.size() == 1) return slots_[0];
    size_t i = rng_.uniform_int(slots_.size());
    size_t j = rng_.uniform_int(slots_.size() - 1);
    if (j >= i) ++j;
    const std::vector<int>& a = slots_[i].image();
    const std::vector<int>& b = slots_[j].image();
    scratch_.resize(a.size());
    if (rng_.coin()) {
      for (size_t x = 0; x < a.size(); ++x) scratch_[x] = a[b[x]];
    } else {
      for (size_t x = 0; x < a.size(); ++x) scratch_[x] = b[a[x]];
    }
    slots_[i].swap_image(scratch_);
    return slots_[i];
  }

 private:
  int degree_ = 0;
  std::vector<Permutation> slots_;
  Permutation identity_;
  std::vector<int> scratch_;
  Rng rng_;
};

// Orbit move used in the samplers: one product-replacement draw applied to
// the state. The group's fixed variables (context, evidence) are untouched.
inline State sample_orbit(const PermGroup& group, const State& s,
                          PrSampler& sampler) {
  if (sampler.trivial()) return s;
  return apply(sampler.step(), s);
}

// Oracle counterpart: enumerate the orbit and draw exactly uniformly.
inline State exact_uniform_orbit_sample(const PermGroup& group, const State& s,
                                        Rng& rng,
                                        size_t cap = kDefaultOrbitCap) {
  std::vector<State> orb = orbit(group, s, {}, cap);
  if (orb.empty()) throw config_error("state has an empty orbit");
  return orb[rng.uniform_int(orb.size())];
}

// Cycle notation, e.g. "(P S)(Q R)"; identity prints as "()". Names
// resolve through the resolver when given, ids otherwise.
inline std::string cycle_notation(
    const Permutation& p,
    const std::function<std::string(int)>& name = {}) {
  std::string out;
  std::vector<char> done(p.degree(), 0);
  for (int i = 0; i < p.degree(); ++i) {
    if (done[i] || p(i) == i) continue;
    out += '(';
    int j = i;
    bool first = true;
    while (!done[j]) {
      done[j] = 1;
      if (!first) out += ' ';
      out += name ? name(j) : std::to_string(j);
      first = false;
      j = p(j);
    }
    out += ')';
  }
  if (out.empty()) out = "()";
  return out;
}

}  // namespace liftmc
