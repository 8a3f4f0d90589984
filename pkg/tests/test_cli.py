import numpy as np
import pytest

from firank.cli import main
from firank.data import read_dataset, read_rankings
from firank.imageio import write_pgm
from firank.imaging import FEATURE_NAMES
from firank.rankers import METHOD_NAMES
from firank.svm import auc
from firank.synth import synthetic_lesion


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def lesion_dirs(tmp_path):
    images, masks = tmp_path / "images", tmp_path / "masks"
    images.mkdir()
    masks.mkdir()
    for i, stem in enumerate(["a", "b", "c"]):
        pixels, mask = synthetic_lesion(i)
        write_pgm(images / f"{stem}.pgm", pixels)
        write_pgm(masks / f"{stem}.pgm", mask.astype(int) * 255)
    (tmp_path / "labels.csv").write_text("stem,label\na,0\nb,1\nc,1\n")
    return tmp_path


@pytest.fixture
def synth_csv(tmp_path, capsys):
    path = tmp_path / "synth.csv"
    assert run(capsys, "synth", "--n", 120, "--seed", 3, "--out", path)[0] == 0
    return path


class TestExtract:
    def args(self, root, *extra):
        return ("extract", "--images", root / "images", "--masks", root / "masks",
                "--labels", root / "labels.csv", *extra)

    def test_three_disks(self, lesion_dirs, capsys):
        out = lesion_dirs / "features.csv"
        code, _, err = run(capsys, *self.args(lesion_dirs, "--out", out))
        assert code == 0 and err == ""
        ds = read_dataset(out)
        assert ds.features.shape == (3, 15)
        assert ds.feature_names == FEATURE_NAMES
        assert ds.labels.tolist() == [0, 1, 1]
        header = [l for l in out.read_text().splitlines() if not l.startswith("#")][0]
        assert len(header.split(",")) == 16

    def test_unpaired_image_is_reported(self, lesion_dirs, capsys):
        pixels, _ = synthetic_lesion(7)
        write_pgm(lesion_dirs / "images" / "orphan.pgm", pixels)
        out = lesion_dirs / "features.csv"
        code, _, err = run(capsys, *self.args(lesion_dirs, "--out", out))
        assert code == 0
        assert "orphan" in err
        assert read_dataset(out).n_samples == 3
        assert "skipped orphan" in out.read_text()

    def test_corrupt_pgm(self, lesion_dirs, capsys):
        bad = lesion_dirs / "images" / "b.pgm"
        bad.write_bytes(b"P5\n64 64\n255\n" + b"\x00" * 10)
        code, _, err = run(capsys, *self.args(lesion_dirs))
        assert code != 0
        assert "ParseError" in err and "b.pgm" in err


class TestRank:
    def test_all_methods(self, synth_csv, capsys, tmp_path):
        out = tmp_path / "r.csv"
        assert run(capsys, "rank", "--data", synth_csv, "--out", out)[0] == 0
        rankings = read_rankings(out)
        assert [r.method for r in rankings] == list(METHOD_NAMES)
        assert all(len(r.order) == 15 for r in rankings)
        body = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert len(body) == 1 + 14 * 15

    def test_subset_and_rerun(self, synth_csv, capsys):
        code, first, _ = run(capsys, "rank", "--data", synth_csv, "--methods", "ttest,roc")
        assert code == 0
        assert [r.method for r in _parse(first, synth_csv.parent)] == ["ttest", "roc"]
        assert run(capsys, "rank", "--data", synth_csv, "--methods", "ttest,roc")[1] == first

    def test_unknown_method(self, synth_csv, capsys):
        code, _, err = run(capsys, "rank", "--data", synth_csv, "--methods", "ttest,bogus")
        assert code != 0 and "bogus" in err and "wilcoxon" in err


def _parse(text, folder):
    path = folder / "parsed.csv"
    path.write_text(text)
    return read_rankings(path)


class TestSearch:
    def test_kmax_one(self, synth_csv, capsys):
        code, out, _ = run(capsys, "search", "--data", synth_csv, "--kmax", 1, "--folds", 5)
        assert code == 0
        assert "evaluated_count = 15" in out
        table = out.split("rank\tsubset\tmean_auc\tstd_auc\n")[1].strip().splitlines()
        assert len(table) == 15
        assert "config.seed = 42" in out

    def test_deterministic(self, synth_csv, capsys):
        argv = ("search", "--data", synth_csv, "--kmax", 2, "--folds", 5, "--seed", 9)
        assert run(capsys, *argv)[1] == run(capsys, *argv, "--threads", 2)[1]


class TestEff:
    def test_published(self, capsys):
        code, out, _ = run(capsys, "eff")
        rows = [l for l in out.splitlines() if not l.startswith("#")]
        assert code == 0 and rows[0] == "method,m,n,eff" and len(rows) == 31
        assert "fir_mat_ttest,3,4,3/4" in rows and "fir_asl,3,14,3/14" in rows

    def test_bad_optimal(self, capsys):
        code, _, err = run(capsys, "eff", "--optimal", "2,16")
        assert code != 0 and "InvalidIndex" in err


class TestSynth:
    def test_deterministic(self, capsys):
        assert run(capsys, "synth", "--seed", 5)[1] == run(capsys, "synth", "--seed", 5)[1]
        assert run(capsys, "synth", "--seed", 5)[1] != run(capsys, "synth", "--seed", 6)[1]

    def test_noise_free_single_feature(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        run(capsys, "synth", "--informative", 4, "--noise", 0, "--out", path)
        ds = read_dataset(path)
        assert auc(ds.features[:, 3], ds.labels) == 1.0


class TestReport:
    def test_formats(self, capsys):
        code, csv_out, _ = run(capsys, "report", "--format", "csv")
        assert code == 0
        rows = [l for l in csv_out.splitlines() if not l.startswith("#")]
        assert rows[0].split(",")[-3:] == ["m", "n", "eff"] and len(rows) == 31
        code, text, _ = run(capsys, "report")
        assert code == 0 and len(text.strip().splitlines()) == 32
