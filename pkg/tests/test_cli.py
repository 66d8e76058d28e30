from __future__ import annotations

import json
from pathlib import Path

import pytest

from treematch.cli import build_parser, main
from treematch.evaluate import load_bundle

PAGE = """
<html>
 <head><title>demo</title></head>
 <body>
  <nav class="top nav"><ul><li><a href="/a">A</a></li><li><a href="/b">B</a></li></ul></nav>
  <main id="content">
   <h1>Demo page</h1>
   <section class="card"><h2>one</h2><p class="txt">first words here</p></section>
   <section class="card"><h2>two</h2><p class="txt">second words there</p></section>
  </main>
  <footer id="foot"><p>fine print</p></footer>
 </body>
</html>
"""


@pytest.fixture
def page_file(tmp_path) -> Path:
    path = tmp_path / "demo.html"
    path.write_text(PAGE, encoding="utf-8")
    return path


class TestMatchCommand:
    def test_self_match_exits_zero(self, page_file, tmp_path, capsys):
        out = tmp_path / "m.json"
        code = main(["match", str(page_file), str(page_file), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "unmatched_t1=0 unmatched_t2=0" in stdout
        matching = json.loads(out.read_text())
        assert matching["unmatched_t1"] == []
        assert matching["unmatched_t2"] == []

    def test_missing_file_exits_one(self, tmp_path, capsys):
        code = main(["match", str(tmp_path / "nope.html"), str(tmp_path / "nope.html"),
                     "--out", str(tmp_path / "m.json")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_ted_algorithm(self, page_file, tmp_path, capsys):
        out = tmp_path / "m.json"
        code = main(["match", str(page_file), str(page_file),
                     "--algorithm", "ted", "--out", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["unmatched_t1"] == []

    def test_config_echoed(self, page_file, tmp_path, capsys):
        main(["match", str(page_file), str(page_file),
              "--out", str(tmp_path / "m.json"), "--alpha", "0.8"])
        err = capsys.readouterr().err
        assert "alpha=0.8" in err

    def test_empty_document_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "empty.html"
        bad.write_text("", encoding="utf-8")
        code = main(["match", str(bad), str(bad), "--out", str(tmp_path / "m.json")])
        assert code == 1


class TestMutateCommand:
    def test_ratios_span_evenly(self, page_file, tmp_path):
        out_dir = tmp_path / "bundles"
        code = main(["mutate", str(page_file), "--ratio", "0.5", "--count", "10",
                     "--out-dir", str(out_dir), "--seed", "3"])
        assert code == 0
        bundles = sorted(out_dir.iterdir())
        assert len(bundles) == 10
        ratios = [load_bundle(b).log.ratio for b in bundles]
        assert ratios == pytest.approx([0.05 * k for k in range(10)])

    def test_count_one_ratio_zero_identity_bundle(self, page_file, tmp_path):
        out_dir = tmp_path / "bundles"
        main(["mutate", str(page_file), "--ratio", "0", "--count", "1",
              "--out-dir", str(out_dir)])
        bundle = load_bundle(next(out_dir.iterdir()))
        assert (bundle.source.size == bundle.mutant.size)
        assert bundle.log.ops == ()
        src = [(n.tag, n.attributes, n.text) for n in bundle.source]
        dst = [(n.tag, n.attributes, n.text) for n in bundle.mutant]
        assert src == dst

    def test_byte_identical_with_same_seed(self, page_file, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        for d in (d1, d2):
            main(["mutate", str(page_file), "--ratio", "0.4", "--count", "3",
                  "--out-dir", str(d), "--seed", "9"])
        for b1, b2 in zip(sorted(d1.rglob("*.json")), sorted(d2.rglob("*.json"))):
            assert b1.read_bytes() == b2.read_bytes()


class TestBenchCommand:
    def test_empty_corpus_header_only(self, tmp_path, capsys):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        out = tmp_path / "r.csv"
        code = main(["bench", str(corpus), "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1
        assert lines[0].startswith("page,algorithm,")

    def test_two_algorithms_two_rows_per_pair(self, page_file, tmp_path):
        corpus = tmp_path / "corpus"
        main(["mutate", str(page_file), "--ratio", "0.3", "--count", "2",
              "--out-dir", str(corpus)])
        out = tmp_path / "r.csv"
        code = main(["bench", str(corpus), "--out", str(out),
                     "--algorithms", "similarity,ted", "--iterations", "15"])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1 + 2 * 2
        sidecar = json.loads((tmp_path / "r.csv.config.json").read_text())
        assert sidecar["params"]["iterations"] == 15

    def test_corrupt_bundle_skipped_with_warning(self, page_file, tmp_path, capsys):
        corpus = tmp_path / "corpus"
        main(["mutate", str(page_file), "--ratio", "0", "--count", "1",
              "--out-dir", str(corpus)])
        bad = corpus / "corrupt"
        bad.mkdir()
        (bad / "mutations.json").write_text("{}", encoding="utf-8")
        out = tmp_path / "r.csv"
        code = main(["bench", str(corpus), "--out", str(out), "--iterations", "10"])
        assert code == 0
        assert "warning" in capsys.readouterr().err
        assert len(out.read_text().strip().split("\n")) == 2

    def test_deterministic_quality_columns(self, page_file, tmp_path):
        corpus = tmp_path / "corpus"
        main(["mutate", str(page_file), "--ratio", "0.4", "--count", "3",
              "--out-dir", str(corpus), "--seed", "5"])
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            main(["bench", str(corpus), "--out", str(out), "--seed", "5",
                  "--iterations", "20"])
            rows = out.read_text().strip().split("\n")
            header = rows[0].split(",")
            drop = header.index("elapsed_s")
            outs.append([tuple(v for i, v in enumerate(r.split(",")) if i != drop)
                         for r in rows])
        assert outs[0] == outs[1]


class TestSweepCommand:
    def test_three_rows(self, page_file, tmp_path):
        corpus = tmp_path / "corpus"
        main(["mutate", str(page_file), "--ratio", "0.2", "--count", "2",
              "--out-dir", str(corpus)])
        out = tmp_path / "s.csv"
        code = main(["sweep", str(corpus), "--alphas", "0.3,0.5,0.8",
                     "--out", str(out), "--iterations", "10"])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "alpha,pairs,mean_rate,mean_elapsed_s"
        assert len(lines) == 4


class TestHelp:
    @pytest.mark.parametrize("command", ["match", "mutate", "bench", "sweep"])
    def test_every_param_documented(self, command, capsys):
        parser = build_parser()
        with pytest.raises(SystemExit):
            parser.parse_args([command, "--help"])
        text = capsys.readouterr().out
        for flag in ("--alpha", "--prop-depth", "--weights", "--beta", "--gamma",
                     "--iterations", "--no-match-cost", "--seed",
                     "--flat-tokens", "--tokenize-content"):
            assert flag in text
        assert "default" in text
