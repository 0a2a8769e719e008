#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pplgec/errors.hpp"
#include "pplgec/scoring_engine.hpp"
#include "test_support.hpp"

using namespace pplgec;
using doctest::Approx;

namespace {

std::string training() { return testing::random_text(31, 50, 16, 10); }

std::shared_ptr<NGramOracle> model(const std::string& text) {
  std::istringstream in(text);
  return std::make_shared<NGramOracle>(NGramOracle::train(in));
}

std::vector<std::string> random_sentence(std::mt19937_64& rng, std::size_t max_len) {
  std::vector<std::string> s;
  const auto n = 1 + rng() % max_len;
  for (std::size_t i = 0; i < n; ++i) s.push_back("w" + std::to_string(rng() % 20));
  return s;
}

// Oracle with a fixed table of answers: single masks return a[t], the
// window {t, t+1} returns (b[t], c[t]).
class TableOracle final : public MlmOracle {
 public:
  std::vector<double> a, b, c;
  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override {
    std::vector<MaskResponse> out;
    for (const auto& q : batch) {
      const auto t = q.masked_positions[0];
      if (q.masked_positions.size() == 1)
        out.push_back({{a[t]}});
      else
        out.push_back({{b[t], c[t]}});
    }
    return out;
  }
  std::string model_id() const override { return "table"; }
};

}  // namespace

TEST_CASE("uniform oracle gives ln V for both orders") {
  UniformOracle u(50);
  const std::vector<std::string> s{"a", "b", "c", "d"};
  CHECK(first_order_score(s, u) == Approx(std::log(50.0)).epsilon(1e-15));
  CHECK(second_order_score(s, u) == Approx(std::log(50.0)).epsilon(1e-15));
}

TEST_CASE("scores equal the brute-force formulas") {
  const auto text = training();
  const auto m = model(text);
  const testing::BruteNgram brute(text, 1.0);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_sentence(rng, 12);
    CHECK(first_order_score(s, *m) == Approx(brute.first_order(s)).epsilon(1e-12));
    CHECK(second_order_score(s, *m) == Approx(brute.second_order(s)).epsilon(1e-12));
  }
}

TEST_CASE("second-order terms follow the window structure") {
  TableOracle o;
  o.a = {-1, -2, -3, -4};
  o.b = {-0.5, -1.5, -2.5};
  o.c = {-0.7, -1.7, -2.7};
  const std::vector<std::string> s{"p", "q", "r", "s"};
  const auto terms = second_order_terms(s, o);
  REQUIRE(terms.size() == 4);
  CHECK(terms[0] == -0.5);  // first token of window {0,1}
  CHECK(terms[3] == -2.7);  // second token of window {2,3}
  CHECK(terms[1] == Approx(std::log(0.5 * (std::exp(-0.7) + std::exp(-1.5)))).epsilon(1e-15));
  CHECK(terms[2] == Approx(std::log(0.5 * (std::exp(-1.7) + std::exp(-2.5)))).epsilon(1e-15));
  const double expect = -(terms[0] + terms[1] + terms[2] + terms[3]) / 4;
  CHECK(second_order_score(s, o) == Approx(expect).epsilon(1e-15));
}

TEST_CASE("interior mean is computed in probability space even when tiny") {
  TableOracle o;
  o.a = {0, 0, 0};
  o.b = {-800, -900};
  o.c = {-1000, -700};
  const std::vector<std::string> s{"p", "q", "r"};
  const auto terms = second_order_terms(s, o);
  REQUIRE(std::isfinite(terms[1]));
  // log(0.5 (e^-1000 + e^-900)) = -900 + log(0.5 (1 + e^-100))
  CHECK(terms[1] == Approx(-900 + std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("one-token sentences fall back to first order") {
  const auto m = model(training());
  const std::vector<std::string> s{"w3"};
  CHECK(second_order_terms(s, *m).empty());
  CHECK(second_order_score(s, *m) == first_order_score(s, *m));
}

TEST_CASE("fusion endpoints are exact") {
  const auto m = model(training());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_sentence(rng, 10);
    const auto one = score_variant(s, *m, 1.0);
    const auto zero = score_variant(s, *m, 0.0);
    CHECK(one.fused == first_order_score(s, *m));
    CHECK(zero.fused == second_order_score(s, *m));
    CHECK(one.first_order == zero.first_order);
    CHECK(one.token_count == s.size());
  }
  CHECK(fused_score(2.0, 4.0, 0.25) == Approx(3.5));
  CHECK_THROWS_AS(fused_score(1, 1, -0.01), AlphaOutOfRange);
  CHECK_THROWS_AS(fused_score(1, 1, 1.01), AlphaOutOfRange);
  CHECK_THROWS_AS(fused_score(1, 1, std::nan("")), AlphaOutOfRange);
}

TEST_CASE("a constant logprob shift moves every score by the same amount") {
  auto m = model(training());
  auto shifted = std::make_shared<testing::ShiftedOracle>(m, -0.75);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const auto s = random_sentence(rng, 8);
    CHECK(first_order_score(s, *shifted) ==
          Approx(first_order_score(s, *m) + 0.75).epsilon(1e-12));
    CHECK(second_order_score(s, *shifted) ==
          Approx(second_order_score(s, *m) + 0.75).epsilon(1e-12));
  }
}

TEST_CASE("query budget per sentence") {
  auto counting = std::make_shared<testing::CountingOracle>(std::make_shared<UniformOracle>(9));
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    const std::vector<std::string> s(n, "x");
    const auto before_calls = counting->calls();
    const auto before_single = counting->single_mask();
    const auto before_double = counting->double_mask();
    const auto before_points = counting->point_queries();
    score_variant(s, *counting, 0.5);
    CHECK(counting->calls() - before_calls == 1);
    CHECK(counting->single_mask() - before_single == n);
    CHECK(counting->double_mask() - before_double == n - 1);
    CHECK(counting->point_queries() - before_points == n + 2 * (n - 1));
  }
}

TEST_CASE("score_orders batches many sentences and matches per-sentence scores") {
  const auto m = model(training());
  auto counting = std::make_shared<testing::CountingOracle>(m);
  std::mt19937_64 rng(12);
  std::vector<std::vector<std::string>> batch;
  for (int i = 0; i < 20; ++i) batch.push_back(random_sentence(rng, 9));
  const auto scores = score_orders(batch, *counting);
  CHECK(counting->calls() == 1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(scores[i].first_order == first_order_score(batch[i], *m));
    CHECK(scores[i].second_order == second_order_score(batch[i], *m));
    CHECK(select_score(scores[i], ScorerMode::First, 0.3) == scores[i].first_order);
    CHECK(select_score(scores[i], ScorerMode::Second, 0.3) == scores[i].second_order);
  }
}

TEST_CASE("input checks") {
  UniformOracle u(3);
  const std::vector<std::string> empty;
  CHECK_THROWS_AS(first_order_score(empty, u), InvalidQuery);
  CHECK_THROWS_AS(second_order_score(empty, u), InvalidQuery);
  CHECK(parse_scorer_mode("fused") == ScorerMode::Fused);
  CHECK(to_string(ScorerMode::Second) == "second");
  CHECK_THROWS_AS(parse_scorer_mode("third"), DataError);
}
