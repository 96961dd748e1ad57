#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_set>
#include <vector>

#include "liftmc/colorgraph.hpp"
#include "liftmc/common.hpp"
#include "liftmc/model.hpp"
#include "liftmc/permgroup.hpp"

namespace liftmc {

// Ordered partition of the vertices of a color graph.
struct Partition {
  std::vector<std::vector<int>> cells;
};

namespace detail {

// Partition in nauty-style contiguous storage: `elements` is a permutation
// of the vertices, cells are ranges, a cell is named by its start index.
// Refinement trace events are position- and count-based only, so the trace
// hash is invariant under relabeling along equivalent search branches.
class WorkPartition {
 public:
  WorkPartition(const ColorGraph& g, const std::vector<std::vector<int>>& cells)
      : graph_(&g),
        elements_(),
        position_(g.num_vertices),
        cell_of_(g.num_vertices),
        cell_end_(g.num_vertices, 0),
        num_cells_(static_cast<int>(cells.size())) {
    elements_.reserve(g.num_vertices);
    for (const auto& cell : cells) {
      int start = static_cast<int>(elements_.size());
      for (int v : cell) {
        position_[v] = static_cast<int>(elements_.size());
        cell_of_[v] = start;
        elements_.push_back(v);
      }
      cell_end_[start] = static_cast<int>(elements_.size());
    }
  }

  static std::vector<std::vector<int>> color_cells(const ColorGraph& g) {
    std::vector<std::vector<int>> cells(g.num_colors);
    for (int v = 0; v < g.num_vertices; ++v) cells[g.color[v]].push_back(v);
    return cells;
  }

  int num_vertices() const { return static_cast<int>(elements_.size()); }
  bool discrete() const { return num_cells_ == num_vertices(); }
  int num_cells() const { return num_cells_; }
  const std::vector<int>& elements() const { return elements_; }
  int position_of(int v) const { return position_[v]; }

  std::vector<std::vector<int>> to_cells() const {
    std::vector<std::vector<int>> out;
    int start = 0;
    while (start < num_vertices()) {
      int end = cell_end_[start];
      out.emplace_back(elements_.begin() + start, elements_.begin() + end);
      start = end;
    }
    return out;
  }

  // First smallest non-singleton cell; -1 when discrete.
  int target_cell() const {
    int best = -1, best_size = 0;
    int start = 0;
    while (start < num_vertices()) {
      int size = cell_end_[start] - start;
      if (size > 1 && (best < 0 || size < best_size)) {
        best = start;
        best_size = size;
        if (size == 2) break;
      }
      start = cell_end_[start];
    }
    return best;
  }

  std::vector<int> cell_members(int start) const {
    return std::vector<int>(elements_.begin() + start,
                            elements_.begin() + cell_end_[start]);
  }

  // Worklist refinement to the coarsest equitable refinement w.r.t. the
  // seeded refiner cells. Never merges cells.
  void refine(std::deque<std::vector<int>> work, uint64_t& trace) {
    std::vector<int> cnt(num_vertices(), 0);
    std::vector<int> counted;        // vertices with cnt > 0
    std::vector<int> touched_cells;  // cell starts seen this round
    std::vector<char> cell_seen(num_vertices(), 0);
    std::vector<std::pair<int, int>> scratch;  // (count, vertex)

    while (!work.empty()) {
      std::vector<int> refiner = std::move(work.front());
      work.pop_front();

      for (int v : refiner)
        for (int u : graph_->adjacency[v]) {
          if (cnt[u]++ == 0) counted.push_back(u);
        }
      if (counted.empty()) continue;

      for (int u : counted) {
        int c = cell_of_[u];
        if (!cell_seen[c]) {
          cell_seen[c] = 1;
          touched_cells.push_back(c);
        }
      }
      std::sort(touched_cells.begin(), touched_cells.end());

      for (int start : touched_cells) {
        int end = cell_end_[start];
        if (end - start == 1) continue;
        scratch.clear();
        bool uniform = true;
        for (int i = start; i < end; ++i) {
          int v = elements_[i];
          scratch.emplace_back(cnt[v], v);
          if (cnt[v] != scratch.front().first) uniform = false;
        }
        if (uniform) continue;
        std::sort(scratch.begin(), scratch.end());

        trace = fnv1a(trace, static_cast<uint64_t>(start));
        int i = start;
        size_t k = 0;
        while (k < scratch.size()) {
          int bucket_start = i;
          int key = scratch[k].first;
          std::vector<int> bucket;
          while (k < scratch.size() && scratch[k].first == key) {
            int v = scratch[k].second;
            elements_[i] = v;
            position_[v] = i;
            cell_of_[v] = bucket_start;
            ++i;
            ++k;
            bucket.push_back(v);
          }
          cell_end_[bucket_start] = i;
          trace = fnv1a(trace, static_cast<uint64_t>(key));
          trace = fnv1a(trace, static_cast<uint64_t>(bucket.size()));
          if (bucket_start != start) ++num_cells_;
          work.push_back(std::move(bucket));
        }
      }

      for (int u : counted) cnt[u] = 0;
      counted.clear();
      for (int c : touched_cells) cell_seen[c] = 0;
      touched_cells.clear();
    }
  }

  void refine_all(uint64_t& trace) {
    std::deque<std::vector<int>> work;
    int start = 0;
    while (start < num_vertices()) {
      work.push_back(cell_members(start));
      start = cell_end_[start];
    }
    refine(std::move(work), trace);
  }

  // Split {v} off the front of its cell, then restore equitability. The
  // trace records the cell position, not the vertex, so sibling branches
  // stay comparable.
  void individualize_and_refine(int v, uint64_t& trace) {
    int start = cell_of_[v];
    int end = cell_end_[start];
    int pv = position_[v];
    int other = elements_[start];
    elements_[start] = v;
    elements_[pv] = other;
    position_[v] = start;
    position_[other] = pv;
    cell_end_[start] = start + 1;
    int rest = start + 1;
    cell_end_[rest] = end;
    for (int i = rest; i < end; ++i) cell_of_[elements_[i]] = rest;
    ++num_cells_;
    trace = fnv1a(trace, static_cast<uint64_t>(start));
    std::deque<std::vector<int>> work;
    work.push_back({v});
    refine(std::move(work), trace);
  }

 private:
  const ColorGraph* graph_;
  std::vector<int> elements_;
  std::vector<int> position_;
  std::vector<int> cell_of_;
  std::vector<int> cell_end_;
  int num_cells_;
};

inline void check_partition(const ColorGraph& g, const Partition& p) {
  std::vector<char> seen(g.num_vertices, 0);
  size_t total = 0;
  for (const auto& cell : p.cells) {
    if (cell.empty()) throw config_error("empty partition cell");
    int color = g.color[cell.front()];
    for (int v : cell) {
      if (v < 0 || v >= g.num_vertices || seen[v])
        throw config_error("partition is not a partition of the vertices");
      if (g.color[v] != color)
        throw config_error("partition cell mixes vertex colors");
      seen[v] = 1;
      ++total;
    }
  }
  if (total != static_cast<size_t>(g.num_vertices))
    throw config_error("partition does not cover all vertices");
}

struct EdgeSet {
  explicit EdgeSet(const ColorGraph& g) : stride(g.num_vertices) {
    keys.reserve(g.edges.size() * 2);
    for (auto [u, v] : g.edges) {
      keys.insert(static_cast<uint64_t>(u) * stride + v);
      keys.insert(static_cast<uint64_t>(v) * stride + u);
    }
  }
  bool has(int u, int v) const {
    return keys.count(static_cast<uint64_t>(u) * stride + v) != 0;
  }
  uint64_t stride;
  std::unordered_set<uint64_t> keys;
};

inline bool is_graph_automorphism(const ColorGraph& g, const EdgeSet& edges,
                                  const Permutation& theta) {
  for (int v = 0; v < g.num_vertices; ++v)
    if (g.color[theta(v)] != g.color[v]) return false;
  for (auto [u, v] : g.edges)
    if (!edges.has(theta(u), theta(v))) return false;
  return true;
}

// Union-find orbit structure over vertices for the generators that fix a
// given prefix pointwise; used to skip equivalent branch candidates.
class OrbitUnion {
 public:
  explicit OrbitUnion(int n) : parent_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[a] = b;
  }
  void absorb(const Permutation& g) {
    for (int v = 0; v < g.degree(); ++v) unite(v, g(v));
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

struct AutOptions {
  size_t max_nodes = 1u << 20;  // search-tree guard
};

// Coarsest equitable refinement of the given color-respecting partition.
inline Partition refine(const ColorGraph& g, const Partition& p) {
  detail::check_partition(g, p);
  detail::WorkPartition wp(g, p.cells);
  uint64_t trace = kFnvOffset;
  wp.refine_all(trace);
  return Partition{wp.to_cells()};
}

// Generating set of the automorphism group of a vertex-colored graph via
// individualization-refinement. Branches whose refinement trace diverges
// from the first root-to-leaf path are pruned (they contain no leaf
// equivalent to the first), and sibling candidates in one orbit of the
// already-found prefix-stabilizing generators are collapsed.
inline std::vector<Permutation> automorphism_generators(
    const ColorGraph& g, const AutOptions& options = {}) {
  if (g.num_vertices == 0) return {};
  detail::EdgeSet edges(g);

  std::vector<Permutation> gens;
  std::vector<uint64_t> first_trace;   // trace per depth along first path
  std::vector<int> first_position;     // vertex -> position at first leaf
  bool have_first_leaf = false;
  size_t nodes = 0;

  detail::WorkPartition root(g, detail::WorkPartition::color_cells(g));
  uint64_t root_trace = kFnvOffset;
  root.refine_all(root_trace);

  std::vector<int> prefix;

  auto dfs = [&](auto&& self, const detail::WorkPartition& part,
                 uint64_t trace, size_t depth) -> void {
    if (++nodes > options.max_nodes)
      throw resource_error("automorphism search node budget exceeded");

    if (!have_first_leaf) {
      first_trace.push_back(trace);
    } else {
      if (depth >= first_trace.size() || trace != first_trace[depth]) return;
    }

    if (part.discrete()) {
      if (!have_first_leaf) {
        have_first_leaf = true;
        first_position.resize(part.num_vertices());
        for (int v = 0; v < part.num_vertices(); ++v)
          first_position[v] = part.position_of(v);
        return;
      }
      std::vector<int> image(part.num_vertices());
      const std::vector<int>& order = part.elements();
      for (int v = 0; v < part.num_vertices(); ++v)
        image[v] = order[first_position[v]];
      Permutation theta(std::move(image));
      if (!theta.is_identity() &&
          detail::is_graph_automorphism(g, edges, theta) &&
          std::find(gens.begin(), gens.end(), theta) == gens.end())
        gens.push_back(std::move(theta));
      return;
    }

    int target = part.target_cell();
    std::vector<int> candidates = part.cell_members(target);

    std::vector<int> tried;
    size_t gens_at_build = static_cast<size_t>(-1);
    detail::OrbitUnion orbits(0);
    auto rebuild_orbits = [&]() {
      orbits = detail::OrbitUnion(g.num_vertices);
      for (const Permutation& gen : gens) {
        bool fixes_prefix = true;
        for (int f : prefix)
          if (gen(f) != f) {
            fixes_prefix = false;
            break;
          }
        if (fixes_prefix) orbits.absorb(gen);
      }
      gens_at_build = gens.size();
    };
    rebuild_orbits();

    for (int v : candidates) {
      if (gens.size() != gens_at_build) rebuild_orbits();
      bool redundant = false;
      for (int u : tried)
        if (orbits.find(u) == orbits.find(v)) {
          redundant = true;
          break;
        }
      if (redundant) continue;
      tried.push_back(v);

      detail::WorkPartition child = part;
      uint64_t child_trace = trace;
      child.individualize_and_refine(v, child_trace);
      prefix.push_back(v);
      self(self, child, child_trace, depth + 1);
      prefix.pop_back();

      // With the first path established, only sibling subtrees that can
      // host equivalent leaves remain worth visiting; orbit pruning above
      // already collapses the discovered ones.
    }
  };

  dfs(dfs, root, root_trace, 0);
  return gens;
}

// Test oracle: enumerate every color-respecting vertex bijection and keep
// the edge-preserving ones. Exponential; guarded at 10 vertices.
inline std::vector<Permutation> brute_force_automorphisms(const ColorGraph& g) {
  if (g.num_vertices > 10)
    throw resource_error("brute-force automorphism oracle capped at 10 vertices");
  if (g.num_vertices == 0) return {Permutation::identity(0)};
  detail::EdgeSet edges(g);

  std::vector<std::vector<int>> classes(g.num_colors);
  for (int v = 0; v < g.num_vertices; ++v) classes[g.color[v]].push_back(v);
  std::vector<std::vector<int>> perms = classes;  // images, permuted in place

  std::vector<Permutation> out;
  for (;;) {
    std::vector<int> image(g.num_vertices);
    for (int c = 0; c < g.num_colors; ++c)
      for (size_t i = 0; i < classes[c].size(); ++i)
        image[classes[c][i]] = perms[c][i];
    Permutation theta(std::move(image));
    if (detail::is_graph_automorphism(g, edges, theta))
      out.push_back(std::move(theta));

    // odometer over per-class permutations
    int c = 0;
    while (c < g.num_colors &&
           !std::next_permutation(perms[c].begin(), perms[c].end()))
      ++c;
    if (c == g.num_colors) break;
  }
  return out;
}

// Contextual automorphism group of a model: reduce under context+evidence,
// build the color graph, search, project graph generators to variable
// permutations of the reduced model, and lift back to original ids with
// the assigned variables mapped identically.
inline PermGroup contextual_automorphisms(const Model& model,
                                          const Context& context,
                                          const Evidence& evidence,
                                          const AutOptions& options = {}) {
  Assignment merged = Assignment::merged(context, evidence);
  ReducedModel red = reduce(model, merged);
  ColorGraph graph = build_color_graph(red.model);
  std::vector<Permutation> graph_gens = automorphism_generators(graph, options);

  int n_red = red.model.num_variables();
  std::vector<Permutation> lifted;
  std::unordered_set<Permutation, PermutationHash> seen;
  for (const Permutation& gg : graph_gens) {
    std::vector<int> var_image(n_red);
    for (int v = 0; v < n_red; ++v) {
      int image_vertex = gg(ColorGraph::pos_vertex(v));
      const auto& prov = graph.provenance[image_vertex];
      // The +/- colors make a sign-crossing image impossible; anything else
      // is search-state corruption.
      if (prov.kind != ColorGraph::VertexKind::pos_literal)
        throw config_error("automorphism maps a positive literal node to a "
                           "non-positive node");
      var_image[v] = prov.index;
      if (gg(ColorGraph::neg_vertex(v)) != ColorGraph::neg_vertex(prov.index))
        throw config_error("automorphism maps the literal pair of a variable "
                           "inconsistently");
    }
    Permutation var_perm(std::move(var_image));
    if (var_perm.is_identity()) continue;  // clause-only symmetry

    std::vector<int> full(model.num_variables());
    for (int i = 0; i < model.num_variables(); ++i) full[i] = i;
    for (int v = 0; v < n_red; ++v)
      full[red.orig_of_reduced[v]] = red.orig_of_reduced[var_perm(v)];
    Permutation lift(std::move(full));
    if (seen.insert(lift).second) lifted.push_back(std::move(lift));
  }

  PermGroup group;
  group.degree = model.num_variables();
  group.generators = std::move(lifted);
  for (const Binding& b : merged.bindings()) group.fixed_set.push_back(b.var);
  std::sort(group.fixed_set.begin(), group.fixed_set.end());
  group.check_invariants();
  return group;
}

}  // namespace liftmc
