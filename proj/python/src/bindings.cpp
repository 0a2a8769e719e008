#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pplgec/cli.hpp"
#include "pplgec/confusion_registry.hpp"
#include "pplgec/corpus_io.hpp"
#include "pplgec/corrector.hpp"
#include "pplgec/errors.hpp"
#include "pplgec/eval_harness.hpp"
#include "pplgec/mlm_oracle.hpp"
#include "pplgec/remote_oracle.hpp"
#include "pplgec/report.hpp"
#include "pplgec/scoring_engine.hpp"
#include "pplgec/text.hpp"

namespace py = pybind11;
using namespace pplgec;

namespace {

ConfusionRegistry registry_from_text(const std::string& text) {
  std::istringstream in(text);
  return load_confusion_sets(in);
}

Corpus corpus_from_text(const std::string& text, const ConfusionRegistry& reg) {
  std::istringstream in(text);
  return parse_corpus(in, reg);
}

AlphaTable alpha_table(const py::object& alpha, const ConfusionRegistry& reg) {
  if (alpha.is_none()) return AlphaTable();
  if (py::isinstance<py::float_>(alpha) || py::isinstance<py::int_>(alpha))
    return AlphaTable(alpha.cast<double>());
  AlphaTable t;
  for (auto [k, v] : alpha.cast<py::dict>())
    t.set(reg.resolve_type(k.cast<std::string>()), v.cast<double>());
  return t;
}

py::dict correction_dict(const Correction& c) {
  py::dict d;
  d["position"] = c.position;
  d["error_type"] = c.error_type.name();
  d["original"] = c.original_word ? py::cast(*c.original_word) : py::none();
  d["predicted"] = c.predicted_word;
  d["changed"] = c.changed;
  py::list ranked;
  for (const auto& e : c.ranked.entries)
    ranked.append(py::make_tuple(e.candidate, e.score.first_order, e.score.second_order,
                                 e.score.fused));
  d["ranked"] = ranked;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pplgec, m) {
  m.doc() = "Closed-class grammatical error correction by multi-order pseudo-perplexity";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<BackendUnavailable>(m, "BackendUnavailable", base.ptr());

  py::class_<ConfusionRegistry>(m, "ConfusionRegistry")
      .def_static("from_text", &registry_from_text, py::arg("text"))
      .def_static("tagalog", [] { return tagalog_registry(); })
      .def("types", [](const ConfusionRegistry& r) {
        std::vector<std::string> out;
        for (const auto& t : r.types()) out.push_back(t.name());
        return out;
      })
      .def("match_types", [](const ConfusionRegistry& r, const std::string& w) {
        std::vector<std::string> out;
        for (const auto& t : r.match_types(w)) out.push_back(t.name());
        return out;
      }, py::arg("word"))
      .def("candidates", [](const ConfusionRegistry& r, const std::string& type) {
        return r.candidates(r.resolve_type(type));
      }, py::arg("error_type"))
      .def("to_text", &ConfusionRegistry::to_string)
      .def("__len__", &ConfusionRegistry::size);

  py::class_<MlmOracle, std::shared_ptr<MlmOracle>>(m, "MlmOracle")
      .def("model_id", &MlmOracle::model_id)
      .def("query", [](const MlmOracle& o, const std::vector<std::string>& tokens,
                       const std::vector<std::size_t>& positions,
                       const std::vector<std::string>& targets) {
        std::vector<MaskQuery> q{{tokens, positions, targets}};
        return o.query(q).front().logprobs;
      }, py::arg("tokens"), py::arg("masked_positions"), py::arg("targets"));

  py::class_<UniformOracle, MlmOracle, std::shared_ptr<UniformOracle>>(m, "UniformOracle")
      .def(py::init<std::size_t>(), py::arg("vocab_size"));

  py::class_<NGramOracle, MlmOracle, std::shared_ptr<NGramOracle>>(m, "NGramOracle")
      .def_static("train", [](const std::string& text, double add_k) {
        std::istringstream in(text);
        return std::make_shared<NGramOracle>(NGramOracle::train(in, add_k));
      }, py::arg("text"), py::arg("add_k") = 1.0)
      .def_static("load", [](const std::string& path) {
        return std::make_shared<NGramOracle>(NGramOracle::load_file(path));
      }, py::arg("path"))
      .def("vocab_size", &NGramOracle::vocab_size)
      .def("conditional", [](const NGramOracle& o, const std::vector<std::string>& tokens,
                             std::size_t pos, const std::string& target, bool lm, bool rm) {
        return o.conditional(tokens, pos, target, lm, rm);
      }, py::arg("tokens"), py::arg("position"), py::arg("target"),
         py::arg("left_masked") = false, py::arg("right_masked") = false);

  py::class_<RemoteOracle, MlmOracle, std::shared_ptr<RemoteOracle>>(m, "RemoteOracle")
      .def(py::init([](const std::string& url, std::size_t in_flight) {
        RemoteOracleOptions opt;
        opt.url = url;
        opt.max_in_flight = in_flight;
        return std::make_shared<RemoteOracle>(opt);
      }), py::arg("url"), py::arg("max_in_flight") = 4);

  py::class_<ScoreBreakdown>(m, "ScoreBreakdown")
      .def_readonly("first_order", &ScoreBreakdown::first_order)
      .def_readonly("second_order", &ScoreBreakdown::second_order)
      .def_readonly("fused", &ScoreBreakdown::fused)
      .def_readonly("alpha", &ScoreBreakdown::alpha)
      .def_readonly("token_count", &ScoreBreakdown::token_count);

  py::call_guard<py::gil_scoped_release> nogil;

  m.def("first_order_score", [](const std::vector<std::string>& t, const MlmOracle& o) {
    return first_order_score(t, o);
  }, py::arg("tokens"), py::arg("oracle"), nogil);
  m.def("second_order_score", [](const std::vector<std::string>& t, const MlmOracle& o) {
    return second_order_score(t, o);
  }, py::arg("tokens"), py::arg("oracle"), nogil);
  m.def("fused_score", &fused_score, py::arg("first"), py::arg("second"), py::arg("alpha"));
  m.def("score_variant", [](const std::vector<std::string>& t, const MlmOracle& o, double a) {
    return score_variant(t, o, a);
  }, py::arg("tokens"), py::arg("oracle"), py::arg("alpha") = 0.5, nogil);

  m.def("correct", [](const std::vector<std::string>& tokens, std::size_t slot,
                      const std::string& type, const ConfusionRegistry& reg,
                      const MlmOracle& oracle, double alpha, const std::string& mode) {
    auto c = correct(tokens, slot, reg.resolve_type(type), reg, oracle, alpha,
                     parse_scorer_mode(mode));
    return correction_dict(c);
  }, py::arg("tokens"), py::arg("slot"), py::arg("error_type"), py::arg("registry"),
     py::arg("oracle"), py::arg("alpha") = 0.5, py::arg("mode") = "fused");

  m.def("recommend_topk", [](const std::vector<std::string>& tokens, std::size_t slot,
                             const std::string& type, const ConfusionRegistry& reg,
                             const MlmOracle& oracle, double alpha, std::size_t k) {
    return recommend_topk(tokens, slot, reg.resolve_type(type), reg, oracle, alpha, k);
  }, py::arg("tokens"), py::arg("slot"), py::arg("error_type"), py::arg("registry"),
     py::arg("oracle"), py::arg("alpha") = 0.5, py::arg("k") = 3);

  m.def("correct_sentence", [](const std::string& sentence, const ConfusionRegistry& reg,
                               const MlmOracle& oracle, const py::object& alpha) {
    const auto tokens = tokenize_sentence(sentence);
    const auto found = correct_text(tokens, reg, oracle, alpha_table(alpha, reg));
    py::list corrections;
    for (const auto& c : found) corrections.append(correction_dict(c));
    return py::make_tuple(join(apply_corrections(tokens, found)), corrections);
  }, py::arg("sentence"), py::arg("registry"), py::arg("oracle"), py::arg("alpha") = py::none());

  m.def("_evaluate_json", [](const std::string& corpus_text, const ConfusionRegistry& reg,
                             const MlmOracle& oracle, const py::object& alpha,
                             const std::string& mode, std::size_t jobs) {
    const auto corpus = corpus_from_text(corpus_text, reg);
    const auto alphas = alpha_table(alpha, reg);
    py::gil_scoped_release release;
    return to_json(evaluate(corpus, reg, oracle, alphas, parse_scorer_mode(mode), jobs)).dump();
  }, py::arg("corpus_text"), py::arg("registry"), py::arg("oracle"), py::arg("alpha"),
     py::arg("mode"), py::arg("jobs"));

  m.def("hit_at_k", [](const std::string& corpus_text, const ConfusionRegistry& reg,
                       const MlmOracle& oracle, std::size_t k, const py::object& alpha,
                       const std::string& mode) {
    const auto corpus = corpus_from_text(corpus_text, reg);
    const auto alphas = alpha_table(alpha, reg);
    py::gil_scoped_release release;
    return hit_at_k(corpus, reg, oracle, alphas, k, parse_scorer_mode(mode));
  }, py::arg("corpus_text"), py::arg("registry"), py::arg("oracle"), py::arg("k"),
     py::arg("alpha") = py::none(), py::arg("mode") = "fused");

  m.def("_tune_alpha_json", [](const std::string& corpus_text, const ConfusionRegistry& reg,
                               const MlmOracle& oracle) {
    const auto corpus = corpus_from_text(corpus_text, reg);
    py::gil_scoped_release release;
    const auto grid = default_alpha_grid();
    return to_json(tune_alpha(corpus, reg, oracle, grid)).dump();
  }, py::arg("corpus_text"), py::arg("registry"), py::arg("oracle"));

  m.def("build_corpus", [](const std::string& raw, const ConfusionRegistry& reg,
                           std::size_t quota, std::uint64_t seed) {
    Quota q;
    for (const auto& t : reg.types()) q[t] = quota;
    std::istringstream in(raw);
    std::ostringstream out;
    write_corpus(build_corpus(in, reg, q, seed), out);
    return out.str();
  }, py::arg("raw_text"), py::arg("registry"), py::arg("quota"), py::arg("seed") = 0);

  m.def("f_beta", &f_beta, py::arg("precision"), py::arg("recall"), py::arg("beta") = 0.5);
  m.def("tokenize", &tokenize_sentence, py::arg("line"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<std::string> full{"pplgec"};
    full.insert(full.end(), args.begin(), args.end());
    std::istringstream in;
    std::ostringstream out, err;
    const int code = run_cli(full, in, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
