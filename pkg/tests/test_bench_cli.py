import numpy as np
import pytest

from sparsepaint import (
    BinaryMask,
    GrayImage,
    density,
    load_image,
    load_mask,
    save_image,
    save_mask,
    save_prob_mask,
    ProbMask,
)
from sparsepaint.bench import CSV_HEADER, read_csv, run_benchmark
from sparsepaint.cli import main
from conftest import synth_image


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("smallcorpus")
    for i in range(2):
        save_image(synth_image(i, 32), d / f"img{i}.pgm")
    return d


def test_metric_psnr_identical_prints_inf(tmp_path, capsys):
    p = tmp_path / "x.pgm"
    save_image(synth_image(0, 16), p)
    assert main(["metric", "psnr", "--a", str(p), "--b", str(p)]) == 0
    assert capsys.readouterr().out.strip() == "inf"


def test_metric_psnr_value(tmp_path, capsys):
    a = tmp_path / "a.pgm"
    b = tmp_path / "b.pgm"
    save_image(GrayImage(np.zeros((4, 4))), a)
    save_image(GrayImage(np.full((4, 4), 255.0)), b)
    assert main(["metric", "psnr", "--a", str(a), "--b", str(b)]) == 0
    assert capsys.readouterr().out.strip() == "0.000000"


def test_inpaint_cli_roundtrip(tmp_path):
    img = tmp_path / "f.pgm"
    mpath = tmp_path / "m.pgm"
    out = tmp_path / "u.pgm"
    f = synth_image(1, 16)
    save_image(f, img)
    known = np.zeros((16, 16), bool)
    known[::4, ::4] = True
    save_mask(BinaryMask(known), mpath)
    assert main(["inpaint", "--image", str(img), "--mask", str(mpath), "--output", str(out)]) == 0
    u = load_image(out)
    assert np.array_equal(u.data[known], np.floor(f.data + 0.5)[known])


def test_inpaint_empty_mask_exits_2(tmp_path, capsys):
    img = tmp_path / "f.pgm"
    mpath = tmp_path / "m.pgm"
    save_image(synth_image(2, 8), img)
    save_mask(BinaryMask(np.zeros((8, 8), bool)), mpath)
    code = main(["inpaint", "--image", str(img), "--mask", str(mpath), "--output", str(tmp_path / "u.pgm")])
    assert code == 2
    assert "no known data" in capsys.readouterr().err


def test_bad_density_exits_1(tmp_path, capsys):
    img = tmp_path / "f.pgm"
    save_image(synth_image(3, 8), img)
    code = main([
        "mask", "ps", "--image", str(img), "--density", "1.5",
        "--output", str(tmp_path / "m.pgm"),
    ])
    assert code == 1


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["inpaint", "--bogus", "x"])
    assert exc.value.code == 1


def test_missing_file_exits_2(tmp_path):
    code = main(["metric", "psnr", "--a", str(tmp_path / "nope.pgm"), "--b", str(tmp_path / "nope.pgm")])
    assert code == 2


def test_mask_belhachmi_cli(tmp_path):
    img = tmp_path / "f.pgm"
    save_image(synth_image(4, 64), img)
    out = tmp_path / "m.pgm"
    assert main(["mask", "belhachmi", "--image", str(img), "--density", "0.1", "--output", str(out)]) == 0
    mask = load_mask(out)
    assert abs(density(mask) - 0.1) < 0.01


def test_mask_sample_cli(tmp_path, capsys):
    img = tmp_path / "f.pgm"
    save_image(synth_image(5, 32), img)
    pfm = tmp_path / "c.pfm"
    save_prob_mask(ProbMask(np.full((32, 32), 0.1)), pfm)
    out = tmp_path / "m.pgm"
    code = main([
        "mask", "sample", "--prob", str(pfm), "--image", str(img),
        "--output", str(out), "--samples", "3", "--tol", "1e-4",
    ])
    assert code == 0
    float(capsys.readouterr().out.strip())  # prints the PSNR
    assert load_mask(out).known.any()


def test_bench_csv_contract(small_corpus, tmp_path):
    out = tmp_path / "bench.csv"
    records = run_benchmark(
        corpus=small_corpus,
        densities=[0.05, 0.1],
        methods=["belhachmi", "random"],
        seed=7,
        out_csv=out,
    )
    text = out.read_text().splitlines()
    assert text[0] == CSV_HEADER
    assert len(text) == len(records) + 1
    parsed = read_csv(out)
    assert len(parsed) == len(records)
    for rec in records:
        assert 0.0 <= rec.density_actual <= 1.0
        assert rec.inpaintings >= 0
        if rec.method == "belhachmi":
            assert rec.inpaintings == 0
    # average TSV exists and mirrors the density/method axes
    avg = (tmp_path / "bench_avg.tsv").read_text().splitlines()
    assert avg[0] == "density\tmethod\tpsnr_db\tinpaintings"
    assert len(avg) == 1 + 2 * 2


def test_bench_determinism_except_wall(small_corpus, tmp_path):
    out1, out2 = tmp_path / "b1.csv", tmp_path / "b2.csv"
    for out in (out1, out2):
        assert main([
            "bench", "--corpus", str(small_corpus), "--densities", "0.1",
            "--methods", "belhachmi,random", "--seed", "3",
            "--output", str(out), "--tol", "1e-4",
        ]) == 0

    def strip_wall(path):
        rows = path.read_text().splitlines()
        return [",".join(r.split(",")[:6] + r.split(",")[7:]) for r in rows]

    assert strip_wall(out1) == strip_wall(out2)


def test_bench_density_actual_matches_dumped_mask(small_corpus, tmp_path):
    out = tmp_path / "bench.csv"
    dump = tmp_path / "dump"
    records = run_benchmark(
        corpus=small_corpus,
        densities=[0.1],
        methods=["random"],
        seed=1,
        out_csv=out,
        dump_dir=dump,
    )
    for rec in records:
        mask = load_mask(dump / f"{rec.image_id}_{rec.method}_{rec.density_target:g}_mask.pgm")
        assert abs(density(mask) - rec.density_actual) < 1e-9


def test_bench_usage_error_on_bad_density(small_corpus, tmp_path):
    code = main([
        "bench", "--corpus", str(small_corpus), "--densities", "1.5",
        "--methods", "belhachmi", "--output", str(tmp_path / "x.csv"),
    ])
    assert code == 1
