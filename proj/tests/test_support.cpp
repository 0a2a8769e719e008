#include "test_support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "pplgec/errors.hpp"

namespace pplgec::testing {

namespace {

std::string lower(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string> words_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(lower(w));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

BruteNgram::BruteNgram(const std::string& text, double add_k) : k_(add_k) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    auto w = words_of(line);
    if (w.empty()) continue;
    for (const auto& x : w) vocab_.insert(x);
    lines_.push_back(std::move(w));
  }
  vocab_.erase("<unk>");
}

std::string BruteNgram::norm(const std::string& w) const {
  auto l = lower(w);
  return vocab_.count(l) ? l : std::string("<unk>");
}

double BruteNgram::unigram(const std::string& w) const {
  double c = 0, n = 0;
  for (const auto& line : lines_)
    for (const auto& x : line) {
      n += 1;
      if (vocab_.count(x) ? x == w : w == "<unk>") c += 1;
    }
  return (c + k_) / (n + k_ * static_cast<double>(vocab_size()));
}

double BruteNgram::conditional(const std::vector<std::string>& tokens, std::size_t pos,
                               const std::string& target, bool left_masked,
                               bool right_masked) const {
  const std::string w = norm(target);
  const double v = static_cast<double>(vocab_size());
  double pl = 0, pr = 0;
  if (pos > 0 && !left_masked) {
    const std::string prev = norm(tokens[pos - 1]);
    double pair = 0, total = 0;
    for (const auto& line : lines_)
      for (std::size_t i = 0; i + 1 < line.size(); ++i)
        if (norm(line[i]) == prev) {
          total += 1;
          if (norm(line[i + 1]) == w) pair += 1;
        }
    pl = (pair + k_) / (total + k_ * v);
  } else {
    pl = unigram(w);
  }
  if (pos + 1 < tokens.size() && !right_masked) {
    const std::string next = norm(tokens[pos + 1]);
    double pair = 0, total = 0;
    for (const auto& line : lines_)
      for (std::size_t i = 0; i + 1 < line.size(); ++i)
        if (norm(line[i + 1]) == next) {
          total += 1;
          if (norm(line[i]) == w) pair += 1;
        }
    pr = (pair + k_) / (total + k_ * v);
  } else {
    pr = unigram(w);
  }
  return std::log(0.5 * pl + 0.5 * pr);
}

double BruteNgram::first_order(const std::vector<std::string>& t) const {
  double s = 0;
  for (std::size_t i = 0; i < t.size(); ++i) s += conditional(t, i, t[i], false, false);
  return -s / static_cast<double>(t.size());
}

double BruteNgram::second_order(const std::vector<std::string>& t) const {
  const std::size_t n = t.size();
  if (n == 1) return first_order(t);
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      s += conditional(t, 0, t[0], false, true);
    } else if (i == n - 1) {
      s += conditional(t, i, t[i], true, false);
    } else {
      const double a = std::exp(conditional(t, i, t[i], true, false));
      const double b = std::exp(conditional(t, i, t[i], false, true));
      s += std::log((a + b) / 2);
    }
  }
  return -s / static_cast<double>(n);
}

// ---------------------------------------------------------------------------

std::vector<MaskResponse> CountingOracle::query(std::span<const MaskQuery> batch) const {
  ++calls_;
  queries_ += batch.size();
  for (const auto& q : batch) {
    points_ += q.masked_positions.size();
    if (q.masked_positions.size() == 1) ++single_;
    if (q.masked_positions.size() == 2) ++double_;
  }
  return inner_->query(batch);
}

std::vector<MaskResponse> ShiftedOracle::query(std::span<const MaskQuery> batch) const {
  auto out = inner_->query(batch);
  for (auto& r : out)
    for (auto& lp : r.logprobs) lp += shift_;
  return out;
}

// ---------------------------------------------------------------------------

std::string random_text(std::uint64_t seed, std::size_t lines, std::size_t vocab,
                        std::size_t max_len) {
  std::mt19937_64 rng(seed);
  std::ostringstream out;
  for (std::size_t i = 0; i < lines; ++i) {
    const std::size_t len = 2 + rng() % (max_len - 1);
    for (std::size_t j = 0; j < len; ++j) out << (j ? " " : "") << 'w' << rng() % vocab;
    out << '\n';
  }
  return out.str();
}

namespace {

const std::vector<std::string> kFiller = {
    "bahay", "araw",   "tubig",  "bata",   "guro",  "aklat", "lungsod", "pamahalaan",
    "ulan",  "dagat",  "bundok", "pagkain", "trabaho", "pera", "balita", "mamamayan",
    "kotse", "paaralan", "gabi", "umaga"};

}  // namespace

std::string planted_text(const ConfusionRegistry& registry, std::size_t lines,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& sets = registry.sets();
  std::ostringstream out;
  for (std::size_t i = 0; i < lines; ++i) {
    const std::size_t ti = i % sets.size();
    const std::size_t wi = rng() % sets[ti].words.size();
    std::vector<std::string> s;
    for (std::size_t f = rng() % 3; f > 0; --f) s.push_back(kFiller[rng() % kFiller.size()]);
    s.push_back("kaliwa" + std::to_string(ti) + "x" + std::to_string(wi));
    s.push_back(sets[ti].words[wi]);
    s.push_back("kanan" + std::to_string(ti) + "x" + std::to_string(wi));
    for (std::size_t f = rng() % 3; f > 0; --f) s.push_back(kFiller[rng() % kFiller.size()]);
    for (std::size_t j = 0; j < s.size(); ++j) out << (j ? " " : "") << s[j];
    out << '\n';
  }
  return out.str();
}

Corpus synthetic_corpus(const ConfusionRegistry& registry, std::size_t per_type,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Corpus c;
  for (const auto& set : registry.sets()) {
    for (std::size_t i = 0; i < per_type; ++i) {
      Sample s;
      const std::size_t len = 2 + rng() % 6;
      const std::size_t slot = rng() % len;
      for (std::size_t j = 0; j < len; ++j)
        s.tokens.push_back(j == slot ? std::string(kMaskToken) : kFiller[rng() % kFiller.size()]);
      s.answer = set.words[rng() % set.words.size()];
      s.error_type = set.error_type;
      c.samples.push_back(std::move(s));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------

FakeSidecar::FakeSidecar(std::shared_ptr<const MlmOracle> model,
                         std::optional<std::size_t> max_tokens, std::size_t max_items)
    : model_(std::move(model)), server_(std::make_unique<httplib::Server>()) {
  using nlohmann::json;
  auto& srv = *server_;
  srv.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  srv.Get("/v1/info", [this, max_tokens](const httplib::Request&, httplib::Response& res) {
    json j = {{"model_id", model_->model_id()}};
    j["max_tokens"] = max_tokens && !hide_limit_ ? json(*max_tokens) : json(nullptr);
    res.set_content(j.dump(), "application/json");
  });
  srv.Post("/v1/mask_logprob", [this, max_tokens, max_items](const httplib::Request& req,
                                                              httplib::Response& res) {
    ++posts_;
    const auto now = ++active_;
    for (auto p = peak_.load(); now > p && !peak_.compare_exchange_weak(p, now);) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    auto reject = [&](int status, const std::string& msg) {
      res.status = status;
      res.set_content(json{{"error", msg}}.dump(), "application/json");
    };
    if (failing_) {
      reject(500, "inference failure");
      --active_;
      return;
    }
    try {
      const auto body = json::parse(req.body);
      const auto& items = body.at("items");
      for (auto s = max_seen_.load(); items.size() > s && !max_seen_.compare_exchange_weak(s, items.size());) {
      }
      if (items.size() > max_items) {
        reject(400, "too many items");
      } else {
        std::vector<MaskQuery> qs;
        for (const auto& it : items) {
          MaskQuery q{it.at("tokens").get<std::vector<std::string>>(),
                      it.at("masked_positions").get<std::vector<std::size_t>>(),
                      it.at("targets").get<std::vector<std::string>>()};
          if (max_tokens && q.tokens.size() > *max_tokens) throw std::length_error("too long");
          qs.push_back(std::move(q));
        }
        json out = json::array();
        for (const auto& r : model_->query(qs)) out.push_back({{"logprobs", r.logprobs}});
        res.set_content(json{{"items", out}}.dump(), "application/json");
      }
    } catch (const std::length_error& e) {
      reject(413, e.what());
    } catch (const std::exception& e) {
      reject(400, e.what());
    }
    --active_;
  });
  port_ = srv.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

FakeSidecar::~FakeSidecar() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

int closed_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);  // bound but never listened on, so connects are refused
  return ntohs(addr.sin_port);
}

}  // namespace pplgec::testing
