#include <random>
#include <sstream>

#include "doctest.h"
#include "pplgec/errors.hpp"
#include "pplgec/remote_oracle.hpp"
#include "pplgec/scoring_engine.hpp"
#include "test_support.hpp"

using namespace pplgec;

namespace {

std::shared_ptr<NGramOracle> model() {
  std::istringstream in(testing::random_text(17, 40, 12, 9));
  return std::make_shared<NGramOracle>(NGramOracle::train(in));
}

std::vector<MaskQuery> random_queries(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MaskQuery> qs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> toks;
    const auto len = 2 + rng() % 8;
    for (std::size_t j = 0; j < len; ++j) toks.push_back("w" + std::to_string(rng() % 14));
    const std::size_t p = rng() % (len - 1);
    if (rng() % 2)
      qs.push_back({toks, {p}, {toks[p]}});
    else
      qs.push_back({toks, {p, p + 1}, {toks[p], toks[p + 1]}});
  }
  return qs;
}

}  // namespace

TEST_CASE("remote oracle reproduces the backing model exactly") {
  auto m = model();
  testing::FakeSidecar sidecar(m, 64);
  RemoteOracle remote({.url = sidecar.url()});
  CHECK(remote.model_id() == m->model_id());
  CHECK(remote.max_tokens() == std::optional<std::size_t>(64));
  const auto qs = random_queries(300, 1);
  const auto expect = m->query(qs);
  const auto got = remote.query(qs);
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < qs.size(); ++i) CHECK(got[i].logprobs == expect[i].logprobs);
}

TEST_CASE("batches are chunked and concurrency is bounded") {
  auto m = model();
  testing::FakeSidecar sidecar(m, std::nullopt);
  RemoteOracle remote({.url = sidecar.url()});
  const auto qs = random_queries(32 * 12 + 5, 2);
  remote.query(qs);
  CHECK(sidecar.posts() == 13);
  CHECK(remote.requests_sent() == 13);
  CHECK(sidecar.max_items_seen() <= 32);
  CHECK(sidecar.peak_concurrency() <= 4);
  CHECK(sidecar.peak_concurrency() >= 1);
}

TEST_CASE("empty batch sends nothing") {
  testing::FakeSidecar sidecar(model(), std::nullopt);
  RemoteOracle remote({.url = sidecar.url()});
  CHECK(remote.query({}).empty());
  CHECK(sidecar.posts() == 0);
}

TEST_CASE("status codes map to errors") {
  auto m = model();
  SUBCASE("413 and client-side length check") {
    testing::FakeSidecar sidecar(m, 4);
    RemoteOracle remote({.url = sidecar.url()});
    const std::vector<MaskQuery> qs{{{"w1", "w2", "w3", "w4", "w5"}, {0}, {"w1"}}};
    CHECK_THROWS_AS(remote.query(qs), SequenceTooLong);
    CHECK_THROWS_AS(first_order_score(qs[0].tokens, remote), SequenceTooLong);
  }
  SUBCASE("413 from the server") {
    testing::FakeSidecar sidecar(m, 4);
    sidecar.hide_limit();
    RemoteOracle remote({.url = sidecar.url()});
    CHECK_FALSE(remote.max_tokens());
    const std::vector<MaskQuery> qs{{{"w1", "w2", "w3", "w4", "w5"}, {0}, {"w1"}}};
    CHECK_THROWS_AS(remote.query(qs), SequenceTooLong);
    CHECK(sidecar.posts() == 1);
  }
  SUBCASE("400 when the server cap is smaller than the client chunk") {
    testing::FakeSidecar sidecar(m, std::nullopt, 8);
    RemoteOracle remote({.url = sidecar.url()});
    CHECK_THROWS_AS(remote.query(random_queries(20, 3)), InvalidQuery);
  }
  SUBCASE("invalid query rejected before sending") {
    testing::FakeSidecar sidecar(m, std::nullopt);
    RemoteOracle remote({.url = sidecar.url()});
    const std::vector<MaskQuery> qs{{{"w1"}, {3}, {"w1"}}};
    CHECK_THROWS_AS(remote.query(qs), InvalidQuery);
    CHECK(sidecar.posts() == 0);
  }
  SUBCASE("5xx") {
    testing::FakeSidecar sidecar(m, std::nullopt);
    RemoteOracle remote({.url = sidecar.url()});
    sidecar.fail(true);
    CHECK_THROWS_AS(remote.query(random_queries(3, 4)), BackendUnavailable);
  }
}

TEST_CASE("unreachable service") {
  const auto url = "http://127.0.0.1:" + std::to_string(testing::closed_port());
  CHECK_THROWS_AS(RemoteOracle({.url = url, .timeout_seconds = 2}), BackendUnavailable);
}

TEST_CASE("scores through the wire equal local scores") {
  auto m = model();
  testing::FakeSidecar sidecar(m, std::nullopt);
  RemoteOracle remote({.url = sidecar.url()});
  const std::vector<std::string> s{"w1", "w5", "w3", "w9", "w2"};
  CHECK(first_order_score(s, remote) == first_order_score(s, *m));
  CHECK(second_order_score(s, remote) == second_order_score(s, *m));
}
