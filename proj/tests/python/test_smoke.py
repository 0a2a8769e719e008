import math
import os
import subprocess

import pytest

import pplgec

TRAIN = "a b c a b d\n"


def planted_text():
    lines = []
    for i in range(60):
        lines.append("kaliwa0 hindi kanan0 bahay")
        lines.append("araw kaliwa1 huwag kanan1")
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="module")
def registry():
    return pplgec.ConfusionRegistry.tagalog()


@pytest.fixture(scope="module")
def model():
    return pplgec.NGramOracle.train(planted_text())


def test_registry(registry):
    assert len(registry) == 8
    assert registry.candidates("negative_adverb") == ["hindi", "wag", "huwag", "di", "hinding-hindi"]
    assert registry.match_types("iyong") == ["personal_pronouns", "demonstrative"]
    with pytest.raises(pplgec.DataError):
        pplgec.ConfusionRegistry.from_text("article: ni si ni")


def test_ngram_worked_example():
    m = pplgec.NGramOracle.train(TRAIN)
    assert m.vocab_size() == 5
    assert m.conditional(["a", "_", "c"], 1, "b") == pytest.approx(math.log(8 / 21), abs=1e-12)
    assert m.query(["a", "b", "c"], [1], ["b"]) == [pytest.approx(math.log(8 / 21), abs=1e-12)]


def test_scores_and_fusion():
    u = pplgec.UniformOracle(50)
    s = ["a", "b", "c"]
    assert pplgec.first_order_score(s, u) == pytest.approx(math.log(50))
    assert pplgec.second_order_score(s, u) == pytest.approx(math.log(50))
    b = pplgec.score_variant(s, u, 0.3)
    assert b.fused == pytest.approx(math.log(50))
    with pytest.raises(pplgec.DataError):
        pplgec.fused_score(1.0, 2.0, 1.5)


def test_correction(registry, model):
    fixed, corrections = pplgec.correct_sentence("kaliwa0 di kanan0 bahay", registry, model, 0.5)
    assert fixed == "kaliwa0 hindi kanan0 bahay"
    assert corrections[0]["predicted"] == "hindi"
    assert corrections[0]["changed"]
    top = pplgec.recommend_topk(["kaliwa1", "[MASK]", "kanan1"], 1, "negative_adverb",
                                registry, model, k=2)
    assert top[0] == "huwag" and len(top) == 2


def test_evaluate_and_hitk(registry, model):
    corpus = pplgec.build_corpus(planted_text(), registry, 10, seed=3)
    report = pplgec.evaluate(corpus, registry, model, alpha=0.5)
    t = report["types"]["negative_adverb"]
    assert t["samples"] == 10
    assert t["p_micro"] == t["r_micro"] == t["f05_micro"] == t["accuracy"]
    assert pplgec.hit_at_k(corpus, registry, model, 5, alpha=0.5) == 1.0
    tuned = pplgec.tune_alpha(corpus, registry, model)
    assert 0.0 <= tuned["types"]["negative_adverb"]["alpha"] <= 1.0


def test_metrics_helpers():
    assert pplgec.f_beta(0.5, 1.0) == pytest.approx(0.5555555555555556)
    assert pplgec.tokenize("Hindi, siya.") == ["Hindi", ",", "siya", "."]


def test_run_cli_in_process():
    code, out, err = pplgec.run_cli(["evaluate"])
    assert code == 1


@pytest.mark.skipif("PPLGEC_CLI" not in os.environ, reason="CLI binary path not provided")
def test_cli_binary(tmp_path):
    text = tmp_path / "train.txt"
    text.write_text(planted_text())
    model_path = tmp_path / "m.ngram"
    cli = os.environ["PPLGEC_CLI"]
    subprocess.run([cli, "ngram", "train", "--input", str(text), "-o", str(model_path)], check=True)
    out = subprocess.run([cli, "correct", "--oracle", f"ngram:{model_path}", "--input", "-"],
                         input="kaliwa1 wag kanan1\n", capture_output=True, text=True, check=True)
    assert out.stdout == "kaliwa1 huwag kanan1\n"
