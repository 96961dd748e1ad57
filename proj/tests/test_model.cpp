#include <cmath>

#include "doctest.h"
#include "liftmc/domains.hpp"
#include "liftmc/model.hpp"
#include "test_util.hpp"

using namespace liftmc;

TEST_CASE("log_weight basics") {
  Model empty;
  empty.add_variable("P");
  empty.add_variable("Q");
  CHECK(log_weight(empty, State(2)) == 0.0);

  Model m;
  int p = m.add_variable("P");
  int q = m.add_variable("Q");
  m.add_clause({{p, true}, {q, true}}, 1.5);
  State s(2);
  CHECK(log_weight(m, s) == 0.0);
  s.set(p, 1);
  CHECK(log_weight(m, s) == 1.5);

  CHECK_THROWS_AS(log_weight(m, State(3)), dimension_error);
}

TEST_CASE("log_weight matches an independent per-clause evaluator") {
  SportsParams params;
  params.num_students = 5;
  params.dorm_size = 5;
  params.group_size = 5;
  Domain d = gen_sports(params);
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    State s(d.model.num_variables());
    for (int v = 0; v < s.size(); ++v) s.set(v, rng.coin());
    CHECK(log_weight(d.model, s) ==
          doctest::Approx(testutil::independent_log_weight(d.model, s))
              .epsilon(1e-12));
  }
}

TEST_CASE("exact_distribution uniform and closed forms") {
  Model m;
  m.add_variable("P");
  m.add_variable("Q");
  auto probs = exact_distribution(m);
  REQUIRE(probs.size() == 4);
  for (double p : probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  Model single;
  int p = single.add_variable("P");
  single.add_clause({{p, true}}, std::log(3.0));
  auto marg = exact_marginals(single);
  CHECK(marg[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("exact_distribution agrees with direct enumeration on the movie model") {
  Model m = testutil::movie_model();
  int n = m.num_variables();
  // direct 8-row table via the independent evaluator
  std::vector<double> weights;
  double z = 0.0;
  for (uint64_t idx = 0; idx < (1u << n); ++idx) {
    State s = State::from_index(n, idx);
    weights.push_back(std::exp(testutil::independent_log_weight(m, s)));
    z += weights.back();
  }
  auto probs = exact_distribution(m);
  double sum = 0.0;
  for (uint64_t idx = 0; idx < probs.size(); ++idx) {
    CHECK(probs[idx] == doctest::Approx(weights[idx] / z).epsilon(1e-12));
    sum += probs[idx];
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("exact_distribution refuses oversized models") {
  Model m;
  for (int i = 0; i < 21; ++i) m.add_variable("x" + std::to_string(i));
  CHECK_THROWS_AS(exact_distribution(m), resource_error);
  CHECK_THROWS_WITH(exact_distribution(m),
                    doctest::Contains("oracle scale exceeded"));
}

TEST_CASE("reduce: single-variable context worked example") {
  Model m = testutil::pq_rqs_model(1.5, 2.5);
  Assignment ctx;
  ctx.bind(m.require_variable("R"), 0);
  ReducedModel red = reduce(m, ctx);

  REQUIRE(red.model.num_variables() == 3);
  CHECK(red.model.variable(0).name == "P");
  CHECK(red.model.variable(1).name == "Q");
  CHECK(red.model.variable(2).name == "S");
  REQUIRE(red.model.num_clauses() == 2);
  CHECK(red.model.clause(0).weight == 1.5);
  REQUIRE(red.model.clause(0).literals.size() == 2);  // P v Q untouched
  REQUIRE(red.model.clause(1).literals.size() == 2);  // Q v S, R dropped
  CHECK(red.model.clause(1).weight == 2.5);
  CHECK(red.model.variable(red.model.clause(1).literals[0].var).name == "Q");
  CHECK(red.model.variable(red.model.clause(1).literals[1].var).name == "S");
  CHECK(red.satisfied_weight == 0.0);
}

TEST_CASE("reduce: empty context is the identity") {
  Model m = testutil::pq_rqs_model();
  ReducedModel red = reduce(m, Assignment{});
  CHECK(model_to_text(red.model) == model_to_text(m));
  CHECK(red.satisfied_weight == 0.0);
}

TEST_CASE("reduce: evidence elimination makes P and Q alike") {
  Model m = testutil::pr_q_model(1.5);
  Evidence e;
  e.bind(m.require_variable("R"), 0);
  ReducedModel red = reduce(m, e);
  REQUIRE(red.model.num_clauses() == 2);
  CHECK(red.model.clause(0).literals.size() == 1);  // (P, w1)
  CHECK(red.model.clause(1).literals.size() == 1);  // (Q, w1)
  CHECK(red.model.clause(0).weight == red.model.clause(1).weight);
}

TEST_CASE("reduce: satisfied clauses drop and contribute the constant") {
  Model m = testutil::pq_rqs_model(1.5, 2.5);
  Assignment ctx;
  ctx.bind(m.require_variable("R"), 1);
  ReducedModel red = reduce(m, ctx);
  REQUIRE(red.model.num_clauses() == 1);
  CHECK(red.satisfied_weight == 2.5);
}

TEST_CASE("reduction/consistency agreement on random models, exhaustively") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 4 + static_cast<int>(rng.uniform_int(4));  // 4..7 variables
    Model m = testutil::random_model(n, 2 * n, rng);
    Assignment a;
    for (int v = 0; v < n; ++v)
      if (rng.uniform01() < 0.3) a.bind(v, rng.coin());
    ReducedModel red = reduce(m, a);

    bool constant_known = false;
    double constant = 0.0;
    for (uint64_t idx = 0; idx < (1u << n); ++idx) {
      State s = State::from_index(n, idx);
      if (!consistent(s, a)) continue;
      double diff = log_weight(m, s) - log_weight(red.model, restrict_state(red, s));
      if (!constant_known) {
        constant = diff;
        constant_known = true;
      }
      CHECK(diff == doctest::Approx(constant).epsilon(1e-12));
    }
    // the dropped-satisfied total accounts for the constant up to clauses
    // whose residues were empty (those are never satisfied by consistent s)
    if (constant_known) CHECK(constant >= red.satisfied_weight - 1e-12);
  }
}

TEST_CASE("reduce composes over disjoint assignments") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Model m = testutil::random_model(6, 10, rng);
    Assignment a, b, both;
    for (int v = 0; v < 6; ++v) {
      double u = rng.uniform01();
      if (u < 0.25) {
        uint8_t val = rng.coin();
        a.bind(v, val);
        both.bind(v, val);
      } else if (u < 0.5) {
        uint8_t val = rng.coin();
        b.bind(v, val);
        both.bind(v, val);
      }
    }
    ReducedModel two_step = reduce(reduce(m, a).model, [&] {
      // re-express b in the ids of reduce(m, a)
      ReducedModel first = reduce(m, a);
      Assignment remapped;
      for (const Binding& bd : b.bindings())
        remapped.bind(first.reduced_of_orig[bd.var], bd.value);
      return remapped;
    }());
    ReducedModel one_step = reduce(m, both);
    CHECK(model_to_text(two_step.model) == model_to_text(one_step.model));
  }
}

TEST_CASE("consistent") {
  State s(3);
  s.set(0, 1);
  s.set(2, 1);
  CHECK(consistent(s, Assignment{}));
  Assignment c1;
  c1.bind(0, 0);
  CHECK_FALSE(consistent(s, c1));
  Assignment c2;
  c2.bind(0, 1);
  c2.bind(1, 0);
  CHECK(consistent(s, c2));
}

TEST_CASE("model text round-trips bit-exactly") {
  Model m = testutil::movie_model();
  std::string text = model_to_text(m);
  Model again = parse_model(text);
  CHECK(model_to_text(again) == text);
  REQUIRE(again.num_clauses() == m.num_clauses());
  for (int k = 0; k < m.num_clauses(); ++k)
    CHECK(again.clause(k).weight == m.clause(k).weight);

  // odd but exact weights survive
  Model odd;
  odd.add_variable("P");
  odd.add_clause({{0, true}}, 0.1 + 0.2);
  Model odd2 = parse_model(model_to_text(odd));
  CHECK(odd2.clause(0).weight == odd.clause(0).weight);
}

TEST_CASE("parser rejections") {
  CHECK_THROWS_AS(parse_model("var P\nvar P\n"), parse_error);
  CHECK_THROWS_AS(parse_model("var P\n1.0 : Q\n"), parse_error);
  CHECK_THROWS_AS(parse_model("var P\ninf : P\n"), parse_error);
  CHECK_THROWS_AS(parse_model("var P\nnan : P\n"), parse_error);
  CHECK_THROWS_AS(parse_model("var P\n1.0 : P | !P\n"), parse_error);
  CHECK_THROWS_AS(parse_model("var P\n1.0 :\n"), parse_error);
  CHECK_THROWS_AS(parse_model("bogus line\n"), parse_error);

  Model m;
  m.add_variable("P");
  CHECK_THROWS_AS(parse_assignment("P=2\n", m), parse_error);
  CHECK_THROWS_AS(parse_assignment("Q=1\n", m), parse_error);
  CHECK_THROWS_AS(parse_assignment("P=1\nP=0\n", m), parse_error);
  Assignment ok = parse_assignment("# note\nP=1\n", m);
  CHECK(ok.value_of(0) == uint8_t{1});
}

TEST_CASE("context and evidence must stay disjoint") {
  Assignment c, e;
  c.bind(1, 1);
  e.bind(1, 0);
  CHECK_THROWS_AS(Assignment::merged(c, e), config_error);
}
