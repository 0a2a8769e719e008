#include "pplgec/remote_oracle.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "pplgec/errors.hpp"

namespace pplgec {

namespace {

using nlohmann::json;

httplib::Client make_client(const RemoteOracleOptions& opt) {
  httplib::Client cli(opt.url);
  const auto secs = static_cast<time_t>(opt.timeout_seconds);
  const auto usecs = static_cast<time_t>((opt.timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  return cli;
}

std::string error_message(const httplib::Result& res) {
  try {
    auto body = json::parse(res->body);
    if (body.contains("error")) return body["error"].get<std::string>();
  } catch (const json::exception&) {
  }
  return res->body;
}

}  // namespace

RemoteOracle::RemoteOracle(RemoteOracleOptions options) : options_(std::move(options)) {
  if (options_.max_in_flight == 0 || options_.max_batch_items == 0)
    throw DataError("remote oracle pool and batch sizes must be >= 1");
  auto cli = make_client(options_);
  auto res = cli.Get("/v1/info");
  if (!res)
    throw BackendUnavailable("cannot reach " + options_.url + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw BackendUnavailable(options_.url + "/v1/info answered HTTP " + std::to_string(res->status));
  try {
    auto info = json::parse(res->body);
    model_id_ = info.at("model_id").get<std::string>();
    if (info.contains("max_tokens") && !info["max_tokens"].is_null())
      max_tokens_ = info["max_tokens"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("malformed /v1/info response: ") + e.what());
  }
}

std::size_t RemoteOracle::requests_sent() const noexcept {
  return requests_.load();
}

std::vector<MaskResponse> RemoteOracle::post_chunk(std::span<const MaskQuery> chunk) const {
  json items = json::array();
  for (const auto& q : chunk)
    items.push_back({{"tokens", q.tokens},
                     {"masked_positions", q.masked_positions},
                     {"targets", q.targets}});
  const json body = {{"items", std::move(items)}};

  auto cli = make_client(options_);
  ++requests_;
  auto res = cli.Post("/v1/mask_logprob", body.dump(), "application/json");
  if (!res)
    throw BackendUnavailable("request to " + options_.url + " failed: " +
                             httplib::to_string(res.error()));
  if (res->status == 400) throw InvalidQuery("oracle rejected query: " + error_message(res));
  if (res->status == 413) throw SequenceTooLong("oracle rejected query: " + error_message(res));
  if (res->status != 200)
    throw BackendUnavailable("oracle answered HTTP " + std::to_string(res->status) + ": " +
                             error_message(res));

  std::vector<MaskResponse> out;
  try {
    const auto doc = json::parse(res->body);
    const auto& got = doc.at("items");
    if (got.size() != chunk.size())
      throw BackendUnavailable("oracle returned " + std::to_string(got.size()) + " items for " +
                               std::to_string(chunk.size()));
    out.reserve(got.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      MaskResponse r;
      r.logprobs = got[i].at("logprobs").get<std::vector<double>>();
      if (r.logprobs.size() != chunk[i].masked_positions.size())
        throw BackendUnavailable("oracle item " + std::to_string(i) + " has " +
                                 std::to_string(r.logprobs.size()) + " logprobs, expected " +
                                 std::to_string(chunk[i].masked_positions.size()));
      for (double lp : r.logprobs)
        if (!std::isfinite(lp)) throw BackendUnavailable("oracle returned a non-finite logprob");
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("malformed oracle response: ") + e.what());
  }
  return out;
}

std::vector<MaskResponse> RemoteOracle::query(std::span<const MaskQuery> batch) const {
  for (const auto& q : batch) {
    validate_query(q);
    if (max_tokens_ && q.tokens.size() > *max_tokens_)
      throw SequenceTooLong("query has " + std::to_string(q.tokens.size()) +
                            " tokens, oracle accepts at most " + std::to_string(*max_tokens_));
  }
  std::vector<MaskResponse> out(batch.size());
  if (batch.empty()) return out;

  const std::size_t step = options_.max_batch_items;
  const std::size_t chunks = (batch.size() + step - 1) / step;
  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
      const std::size_t begin = c * step;
      const std::size_t len = std::min(step, batch.size() - begin);
      try {
        auto part = post_chunk(batch.subspan(begin, len));
        std::move(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min(options_.max_in_flight, chunks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace pplgec
