#include "pplgec/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "pplgec/confusion_registry.hpp"
#include "pplgec/corpus_io.hpp"
#include "pplgec/corrector.hpp"
#include "pplgec/errors.hpp"
#include "pplgec/parallel.hpp"
#include "pplgec/eval_harness.hpp"
#include "pplgec/remote_oracle.hpp"
#include "pplgec/report.hpp"
#include "pplgec/text.hpp"

namespace pplgec {

namespace {

struct Options {
  std::string registry;
  std::string oracle;
  std::string alpha = "0.5";
  std::string mode = "fused";
  std::string input = "-";
  std::string output;
  std::string corpus;
  std::string details;
  std::string alpha_out;
  std::string quota_file;
  std::size_t quota = 0;
  std::size_t k = 3;
  std::size_t jobs = 0;
  std::size_t cache_size = CachingOracle::kDefaultCapacity;
  std::uint64_t seed = 0;
  double add_k = 1.0;
  double grid_step = 0.01;
  std::optional<double> dev_fraction;
  bool ablation = false;
  bool table = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ConfusionRegistry load_registry(const Options& o) {
  if (o.registry.empty()) return tagalog_registry();
  return load_confusion_sets_file(o.registry);
}

// Reads `path`, or `in` for "-".
std::string slurp(const std::string& path, std::istream& in) {
  std::ostringstream ss;
  if (path == "-") {
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  ss << f.rdbuf();
  return ss.str();
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty() || o.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw DataError("cannot write " + o.output);
  f << text;
  if (!f) throw DataError("failed writing " + o.output);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Corpus read_corpus(const Options& o, const ConfusionRegistry& reg, std::istream& in) {
  std::istringstream ss(slurp(o.corpus, in));
  return parse_corpus(ss, reg);
}

std::vector<double> alpha_grid(double step) {
  if (!(step > 0 && step <= 1)) throw UsageError("--grid-step must lie in (0, 1]");
  if (step == 0.01) return default_alpha_grid();
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor(1.0 / step + 1e-9));
  for (long i = 0; i <= n; ++i) grid.push_back(std::min(1.0, static_cast<double>(i) * step));
  if (grid.back() != 1.0) grid.push_back(1.0);
  return grid;
}

// Fixed number, per-type file, or empty for "auto".
std::optional<AlphaTable> fixed_alphas(const Options& o, const ConfusionRegistry& reg) {
  if (o.alpha == "auto") return std::nullopt;
  std::size_t used = 0;
  try {
    const double a = std::stod(o.alpha, &used);
    if (used == o.alpha.size()) {
      if (!(a >= 0 && a <= 1)) throw UsageError("--alpha must lie in [0, 1]");
      return AlphaTable(a);
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  return AlphaTable::parse_file(o.alpha, reg);
}

int cmd_correct(const Options& o, std::istream& in, std::ostream& out) {
  const auto reg = load_registry(o);
  const auto oracle = make_oracle(o.oracle, o.cache_size);
  const auto alphas = fixed_alphas(o, reg);
  if (!alphas) throw UsageError("correct needs a fixed --alpha value or per-type file");
  if (o.k == 0) throw UsageError("--k must be >= 1");

  std::istringstream text(slurp(o.input, in));
  std::vector<std::vector<std::string>> lines;
  for (std::string line; std::getline(text, line);) lines.push_back(tokenize_sentence(line));

  std::vector<std::vector<Correction>> found(lines.size());
  parallel_for(lines.size(), o.jobs, [&](std::size_t i) {
    found[i] = correct_text(lines[i], reg, *oracle, *alphas);
  });

  std::string corrected;
  std::string details;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    corrected += join(apply_corrections(lines[i], found[i])) + "\n";
    Json slots = Json::array();
    for (const auto& c : found[i]) {
      auto j = to_json(c);
      Json top = Json::array();
      for (std::size_t r = 0; r < std::min(o.k, c.ranked.entries.size()); ++r)
        top.push_back(c.ranked.entries[r].candidate);
      j["suggestions"] = std::move(top);
      slots.push_back(std::move(j));
    }
    details += Json{{"line", i + 1}, {"tokens", lines[i]}, {"corrections", std::move(slots)}}.dump() + "\n";
  }
  emit(o, out, corrected);
  if (!o.details.empty()) {
    std::ofstream f(o.details, std::ios::binary);
    if (!f) throw DataError("cannot write " + o.details);
    f << details;
  }
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::istream& in, std::ostream& out) {
  const auto reg = load_registry(o);
  const auto corpus = read_corpus(o, reg, in);
  const auto oracle = make_oracle(o.oracle, o.cache_size);
  const auto mode = parse_scorer_mode(o.mode);

  Corpus test = corpus;
  std::string protocol = "fixed";
  auto alphas = fixed_alphas(o, reg);
  if (!alphas) {
    if (o.dev_fraction) {
      auto [dev, rest] = split_corpus(corpus, *o.dev_fraction, o.seed);
      if (dev.samples.empty() || rest.samples.empty())
        throw DataError("--dev-fraction leaves an empty dev or test part");
      alphas = tune_alpha(dev, reg, *oracle, alpha_grid(o.grid_step), o.jobs).table();
      test = std::move(rest);
      protocol = "dev-test-split";
    } else {
      protocol = "resubstitution";
    }
  }

  const auto scored = score_corpus(test, reg, *oracle, o.jobs);
  if (!alphas) alphas = tune_alpha_scored(scored, reg, alpha_grid(o.grid_step)).table();

  Json doc;
  MetricsReport shown;
  if (o.ablation) {
    auto ab = ablation_report_scored(scored, reg, *alphas);
    for (auto* r : {&ab.first_only, &ab.second_only, &ab.fused}) r->protocol = protocol;
    doc = to_json(ab);
    shown = ab.fused;
  } else {
    shown = evaluate_scored(scored, reg, *alphas, mode);
    shown.protocol = protocol;
    doc = to_json(shown);
  }
  emit(o, out, dump(doc));
  if (o.table && !o.output.empty() && o.output != "-") out << format_table(shown);
  return kExitOk;
}

int cmd_tune(const Options& o, std::istream& in, std::ostream& out) {
  const auto reg = load_registry(o);
  const auto corpus = read_corpus(o, reg, in);
  const auto oracle = make_oracle(o.oracle, o.cache_size);
  const auto result = tune_alpha(corpus, reg, *oracle, alpha_grid(o.grid_step), o.jobs);
  emit(o, out, dump(to_json(result)));
  if (!o.alpha_out.empty()) {
    std::ofstream f(o.alpha_out);
    if (!f) throw DataError("cannot write " + o.alpha_out);
    result.table().write(f);
  }
  return kExitOk;
}

int cmd_hitk(const Options& o, std::istream& in, std::ostream& out) {
  const auto reg = load_registry(o);
  const auto corpus = read_corpus(o, reg, in);
  const auto oracle = make_oracle(o.oracle, o.cache_size);
  if (o.k == 0) throw UsageError("--k must be >= 1");
  const auto scored = score_corpus(corpus, reg, *oracle, o.jobs);
  auto alphas = fixed_alphas(o, reg);
  if (!alphas) alphas = tune_alpha_scored(scored, reg, alpha_grid(o.grid_step)).table();
  const auto curves = hit_curves(scored, reg, *alphas, parse_scorer_mode(o.mode), o.k);
  emit(o, out, dump(to_json(curves)));
  return kExitOk;
}

int cmd_corpus_build(const Options& o, std::istream& in, std::ostream& out) {
  const auto reg = load_registry(o);
  Quota quota;
  for (const auto& t : reg.types()) quota[t] = o.quota;
  if (!o.quota_file.empty()) {
    std::ifstream f(o.quota_file);
    if (!f) throw DataError("cannot open " + o.quota_file);
    std::size_t lineno = 0;
    for (std::string raw; std::getline(f, raw);) {
      ++lineno;
      auto line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) throw LineError("expected '<type>: <count>'", lineno);
      const auto type = reg.resolve_type(trim(line.substr(0, colon)));
      try {
        quota[type] = std::stoull(std::string(trim(line.substr(colon + 1))));
      } catch (const std::exception&) {
        throw LineError("bad count", lineno);
      }
    }
  }
  std::istringstream raw(slurp(o.input, in));
  auto corpus = build_corpus(raw, reg, quota, o.seed);
  corpus.provenance = "built from " + (o.input == "-" ? std::string("stdin") : o.input) +
                      " seed=" + std::to_string(o.seed) + "; pending expert review";
  std::ostringstream ss;
  write_corpus(corpus, ss);
  emit(o, out, ss.str());
  return kExitOk;
}

int cmd_corpus_stats(const Options& o, std::istream& in, std::ostream& out) {
  const auto reg = load_registry(o);
  const auto stats = corpus_stats(read_corpus(o, reg, in), reg);
  if (o.output.empty() || o.output == "-") {
    out << format_stats_table(stats);
  } else {
    emit(o, out, dump(to_json(stats)));
    out << format_stats_table(stats);
  }
  return kExitOk;
}

int cmd_ngram_train(const Options& o, std::istream& in, std::ostream& out) {
  std::istringstream text(slurp(o.input, in));
  const auto model = NGramOracle::train(text, o.add_k);
  std::ostringstream ss;
  model.save(ss);
  emit(o, out, ss.str());
  return kExitOk;
}

}  // namespace

std::shared_ptr<const MlmOracle> make_oracle(std::string_view spec, std::size_t cache_size) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw UsageError("oracle must be uniform:<V>, ngram:<model> or remote:<url>");
  const auto kind = spec.substr(0, colon);
  const std::string arg(spec.substr(colon + 1));
  std::shared_ptr<const MlmOracle> base;
  if (kind == "uniform") {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || v == 0) throw UsageError("uniform:<V> needs a positive integer V");
    base = std::make_shared<UniformOracle>(v);
  } else if (kind == "ngram") {
    base = std::make_shared<NGramOracle>(NGramOracle::load_file(arg));
  } else if (kind == "remote") {
    RemoteOracleOptions opt;
    opt.url = arg;
    base = std::make_shared<RemoteOracle>(opt);
  } else {
    throw UsageError("unknown oracle kind '" + std::string(kind) + "'");
  }
  if (cache_size == 0) return base;
  return std::make_shared<CachingOracle>(std::move(base), cache_size);
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Closed-class grammatical error correction by multi-order pseudo-perplexity"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;

  auto add_registry = [&](CLI::App* c) {
    c->add_option("--registry", o.registry, "Confusion set file (default: bundled Tagalog sets)");
  };
  auto add_oracle = [&](CLI::App* c) {
    c->add_option("--oracle", o.oracle, "uniform:<V> | ngram:<model> | remote:<url>")->required();
    c->add_option("--cache-size", o.cache_size, "Oracle response cache entries (0 disables)");
    c->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
  };
  auto add_alpha = [&](CLI::App* c) {
    c->add_option("--alpha", o.alpha, "Fusion weight: a number, a per-type file, or auto");
    c->add_option("--grid-step", o.grid_step, "Alpha grid step for auto tuning");
  };
  auto add_output = [&](CLI::App* c) {
    c->add_option("-o,--output", o.output, "Output path (default: stdout)");
  };

  auto* correct = app.add_subcommand("correct", "Correct raw text, one sentence per line");
  add_registry(correct);
  add_oracle(correct);
  add_alpha(correct);
  add_output(correct);
  correct->add_option("--input", o.input, "Input text ('-' for stdin)");
  correct->add_option("--details", o.details, "Write per-slot suggestions as JSON lines");
  correct->add_option("--k", o.k, "Suggestions per slot");

  auto* evaluate = app.add_subcommand("evaluate", "Score a corpus and report P/R/F0.5");
  add_registry(evaluate);
  add_oracle(evaluate);
  add_alpha(evaluate);
  add_output(evaluate);
  evaluate->add_option("--corpus", o.corpus, "Corpus TSV")->required();
  evaluate->add_option("--mode", o.mode, "first | second | fused");
  evaluate->add_option("--dev-fraction", o.dev_fraction,
                       "With --alpha auto: tune on this share, report on the rest");
  evaluate->add_option("--seed", o.seed, "Seed for the dev/test split");
  evaluate->add_flag("--ablation", o.ablation, "Report first-only, second-only and fused");
  evaluate->add_flag("--table", o.table, "Also print a text table to stdout");

  auto* tune = app.add_subcommand("tune-alpha", "Grid-search the fusion weight per error type");
  add_registry(tune);
  add_oracle(tune);
  add_output(tune);
  tune->add_option("--corpus", o.corpus, "Corpus TSV")->required();
  tune->add_option("--grid-step", o.grid_step, "Grid step");
  tune->add_option("--alpha-out", o.alpha_out, "Write the tuned per-type alpha file");

  auto* hitk = app.add_subcommand("hitk", "Hit@K curves for top-K recommendation");
  add_registry(hitk);
  add_oracle(hitk);
  add_alpha(hitk);
  add_output(hitk);
  hitk->add_option("--corpus", o.corpus, "Corpus TSV")->required();
  hitk->add_option("--mode", o.mode, "first | second | fused");
  hitk->add_option("--k", o.k, "Largest K")->default_val(10);

  auto* corpus = app.add_subcommand("corpus", "Corpus tooling");
  corpus->require_subcommand(1);
  auto* build = corpus->add_subcommand("build", "Mine masked-slot samples from raw text");
  add_registry(build);
  add_output(build);
  build->add_option("--input", o.input, "Raw text, one sentence per line ('-' for stdin)");
  build->add_option("--quota", o.quota, "Samples per error type");
  build->add_option("--quota-file", o.quota_file, "Per-type quotas, '<type>: <count>' lines");
  build->add_option("--seed", o.seed, "Sampling seed");
  auto* stats = corpus->add_subcommand("stats", "Per-type sample counts");
  add_registry(stats);
  add_output(stats);
  stats->add_option("--corpus", o.corpus, "Corpus TSV")->required();

  auto* ngram = app.add_subcommand("ngram", "Reference n-gram oracle");
  ngram->require_subcommand(1);
  auto* train = ngram->add_subcommand("train", "Train a bidirectional bigram oracle");
  add_output(train);
  train->add_option("--input", o.input, "Training text ('-' for stdin)");
  train->add_option("--add-k", o.add_k, "Add-k smoothing constant");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*correct) return cmd_correct(o, in, out);
    if (*evaluate) return cmd_evaluate(o, in, out);
    if (*tune) return cmd_tune(o, in, out);
    if (*hitk) return cmd_hitk(o, in, out);
    if (*build) return cmd_corpus_build(o, in, out);
    if (*stats) return cmd_corpus_stats(o, in, out);
    if (*train) return cmd_ngram_train(o, in, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const BackendUnavailable& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace pplgec
