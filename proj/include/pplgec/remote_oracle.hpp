#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pplgec/mlm_oracle.hpp"

namespace pplgec {

struct RemoteOracleOptions {
  /// Base URL, e.g. "http://127.0.0.1:8000".
  std::string url;
  /// Concurrent HTTP requests per query() call.
  std::size_t max_in_flight = 4;
  /// Items per POST; the reference service caps batches at 32.
  std::size_t max_batch_items = 32;
  double timeout_seconds = 60.0;
};

/// Client for the inference sidecar:
///   POST /v1/mask_logprob  {"items":[{"tokens","masked_positions","targets"}]}
///   GET  /v1/health, GET /v1/info -> {"model_id", "max_tokens"}
///
/// Large batches are split into chunks sent over a bounded pool of requests;
/// responses are reassembled in request order.
class RemoteOracle final : public MlmOracle {
 public:
  /// Reads /v1/info. Throws BackendUnavailable when the service is unreachable.
  explicit RemoteOracle(RemoteOracleOptions options);

  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override;
  std::string model_id() const override { return model_id_; }
  std::optional<std::size_t> max_tokens() const override { return max_tokens_; }

  /// Number of POST requests sent so far.
  std::size_t requests_sent() const noexcept;

 private:
  std::vector<MaskResponse> post_chunk(std::span<const MaskQuery> chunk) const;

  RemoteOracleOptions options_;
  std::string model_id_;
  std::optional<std::size_t> max_tokens_;
  mutable std::atomic<std::size_t> requests_{0};
};

}  // namespace pplgec
