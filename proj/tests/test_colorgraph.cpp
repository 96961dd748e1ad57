#include <set>

#include "doctest.h"
#include "liftmc/colorgraph.hpp"
#include "test_util.hpp"

using namespace liftmc;

TEST_CASE("minimal construction: one variable, no clauses") {
  Model m;
  m.add_variable("P");
  ColorGraph g = build_color_graph(m);
  CHECK(g.num_vertices == 2);
  CHECK(g.edges.size() == 1);
  CHECK(g.num_colors == 2);
  CHECK(g.color[ColorGraph::pos_vertex(0)] != g.color[ColorGraph::neg_vertex(0)]);
}

TEST_CASE("shared-weight clauses share a color") {
  Model m = testutil::pq_qs_model(1.5);
  ColorGraph g = build_color_graph(m);
  CHECK(g.num_vertices == 8);  // 6 literal vertices + 2 clause vertices
  CHECK(g.edges.size() == 7);  // 3 pair edges + 4 clause-literal edges
  CHECK(g.num_colors == 3);
  CHECK(g.color[g.clause_vertex(0)] == g.color[g.clause_vertex(1)]);
}

TEST_CASE("distinct weights get distinct clause colors") {
  Model m = testutil::pq_rqs_model(1.5, 2.5);
  ColorGraph g = build_color_graph(m);
  CHECK(g.color[g.clause_vertex(0)] != g.color[g.clause_vertex(1)]);
  CHECK(g.num_colors == 4);
}

TEST_CASE("weight-color bijection and size formulas on random models") {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform_int(6));
    Model m = testutil::random_model(n, 1 + static_cast<int>(rng.uniform_int(10)), rng);
    ColorGraph g = build_color_graph(m);

    size_t lits = 0;
    for (const Clause& c : m.clauses()) lits += c.literals.size();
    CHECK(g.num_vertices == 2 * n + m.num_clauses());
    CHECK(g.edges.size() == static_cast<size_t>(n) + lits);

    for (int a = 0; a < m.num_clauses(); ++a)
      for (int b = 0; b < m.num_clauses(); ++b) {
        bool same_color = g.color[g.clause_vertex(a)] == g.color[g.clause_vertex(b)];
        bool same_weight = m.clause(a).weight == m.clause(b).weight;
        CHECK(same_color == same_weight);
      }

    // literal colors: exactly one color for +nodes, one for -nodes
    std::set<int> pos_colors, neg_colors;
    for (int v = 0; v < n; ++v) {
      pos_colors.insert(g.color[ColorGraph::pos_vertex(v)]);
      neg_colors.insert(g.color[ColorGraph::neg_vertex(v)]);
    }
    CHECK(pos_colors.size() == 1);
    CHECK(neg_colors.size() == 1);
    CHECK(*pos_colors.begin() != *neg_colors.begin());

    // contiguous colors
    std::set<int> all(g.color.begin(), g.color.end());
    CHECK(static_cast<int>(all.size()) == g.num_colors);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == g.num_colors - 1);
  }
}

TEST_CASE("no self loops or duplicate edges") {
  Rng rng(5);
  Model m = testutil::random_model(5, 12, rng);
  ColorGraph g = build_color_graph(m);
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : g.edges) {
    CHECK(u < v);
    CHECK(seen.insert({u, v}).second);
  }
}

TEST_CASE("dimacs export shape") {
  Model m = testutil::pq_qs_model();
  ColorGraph g = build_color_graph(m);
  std::string text = color_graph_to_dimacs(g);
  CHECK(text.rfind("p edge 8 7\n", 0) == 0);
  CHECK(text.find("n 1 ") != std::string::npos);
  CHECK(text.find("e 1 2\n") != std::string::npos);
}
