import pytest

from lsss.cli import main
from lsss.latin_core import format_square_text, parse_square_text, validate_square
from lsss.ls_packing import first_recoverable_square


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


@pytest.fixture
def c1_file(tmp_path):
    path = tmp_path / "c1.txt"
    path.write_text("3\n0 . .\n. 2 .\n. . .\n")
    return path


def test_threshold_end_to_end(run, tmp_path):
    out_dir = tmp_path / "D"
    code, _, _ = run("deal", "threshold", "--n", 3, "--t", 1, "--gen-square", "--seed", 7, "--out", out_dir)
    assert code == 0
    code, out, _ = run("recover", "--store", out_dir, "--share", out_dir / "share-0.json",
                       "--share", out_dir / "share-1.json")
    assert code == 0
    square = parse_square_text(out).to_square()
    assert square.order == 10
    assert square == first_recoverable_square(7)


def test_recover_single_share(run, tmp_path):
    out_dir = tmp_path / "D"
    run("deal", "threshold", "--n", 3, "--t", 1, "--gen-square", "--seed", 7, "--out", out_dir)
    code, _, err = run("recover", "--store", out_dir, "--share", out_dir / "share-0.json")
    assert code == 1
    assert "NotAuthorized" in err


def test_exclusion_and_verify(run, tmp_path):
    out_dir = tmp_path / "D"
    payload = tmp_path / "payload.bin"
    payload.write_bytes(b"family secret")
    assert run("deal", "threshold", "--n", 3, "--t", 1, "--payload-file", payload,
               "--exclude", "1,2", "--seed", 1, "--out", out_dir)[0] == 0
    code, out, _ = run("recover", "--store", out_dir / "store.json", "--raw",
                       "--share", out_dir / "share-0.json", "--share", out_dir / "share-2.json")
    assert (code, out.strip()) == (0, b"family secret".hex())
    code, _, err = run("recover", "--store", out_dir,
                       "--share", out_dir / "share-1.json", "--share", out_dir / "share-2.json")
    assert code == 1 and "NotAuthorized" in err
    code, out, _ = run("verify", "--store", out_dir, "--share", out_dir / "share-2.json")
    assert code == 0 and "commitment 2" in out


def test_reproducible_outputs(run, tmp_path):
    for name in ("A", "B"):
        run("deal", "threshold", "--n", 4, "--t", 1, "--gen-square", "--seed", 5,
            "--parallelism", 1, "--out", tmp_path / name)
    for f in ("store.json", "share-0.json", "share-3.json"):
        assert (tmp_path / "A" / f).read_bytes() == (tmp_path / "B" / f).read_bytes()


def test_ls_critical(run, c1_file):
    assert run("ls", "critical", c1_file)[1].strip() == "critical: yes, strong: yes"


def test_ls_commands(run, tmp_path, c1_file):
    code, out, _ = run("ls", "complete", c1_file)
    assert out == "3\n0 1 2\n1 2 0\n2 0 1\n"
    assert run("ls", "count", c1_file)[1].strip() == "1"
    assert run("ls", "enumerate", "--order", 4)[1].strip() == "576"
    assert run("ls", "bound", "--order", 5)[1].strip() == "34560"
    assert run("ls", "strong", c1_file)[1].strip() == "strong: yes"
    code, out, _ = run("ls", "gen", "--order", 6, "--seed", 3)
    assert validate_square(parse_square_text(out).to_square().grid)
    sq = tmp_path / "sq.txt"
    sq.write_text(out)
    assert run("ls", "check", sq)[0] == 0
    rect = tmp_path / "rect.txt"
    rect.write_text("3\n0 1 2\n. . .\n. . .\n")
    code, out, _ = run("ls", "rect", rect)
    assert out.splitlines()[1] == "0 1 2"
    code, out, _ = run("ls", "force", c1_file)
    assert len(out.splitlines()) == 7 + 4


def test_ls_errors(run, tmp_path):
    assert run("ls", "enumerate", "--order", 6)[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n0 0\n. .\n")
    assert run("ls", "complete", bad)[0] == 2
    impossible = tmp_path / "imp.txt"
    impossible.write_text("4\n0 . 3 1\n. . . .\n. . . .\n. 2 . .\n")
    code, _, err = run("ls", "complete", impossible)
    assert code == 1 and "NoCompletion" in err
    assert run("bogus")[0] == 2


def test_pack_unpack(run, tmp_path):
    sq = first_recoverable_square(0)
    path = tmp_path / "sq.txt"
    path.write_text(format_square_text(sq))
    for fmt in ("256", "324"):
        code, hexed, _ = run("pack", path, "--format", fmt)
        assert code == 0
        code, out, _ = run("unpack", hexed.strip(), "--format", fmt)
        assert parse_square_text(out).to_square() == sq
    code, _, err = run("unpack", "00" * 32)
    assert code == 1 and "CorruptPacking" in err


def test_hash_commands(run, tmp_path):
    assert run("hash", "vector", "--digest-bits", 16, "--block", "00" * 8)[1].strip() == "compress 01d4"
    assert run("hash", "vector", "--digest-bits", 8, "--message-hex", "")[1].strip() == "hash_full ed"
    code, out, _ = run("hash", "diamond-demo", "--k", 3, "--seed", 1)
    assert code == 0 and "all paths reach root: yes" in out


def test_nostradamus(run, tmp_path):
    dia = tmp_path / "dia.json"
    code, root, _ = run("hash", "nostradamus", "commit", "--k", 4, "--seed", 2, "--out", dia)
    assert code == 0
    prefix = tmp_path / "result.txt"
    prefix.write_text("Home team wins 3-1")
    msg = tmp_path / "m.bin"
    code, out, err = run("hash", "nostradamus", "reveal", "--diamond", dia, "--prefix-file", prefix,
                         "--seed", 1, "--out", msg)
    assert code == 0
    assert f"root {root.strip()}" in out and "match: yes" in out
    assert msg.read_bytes().startswith(b"Home team wins 3-1")


def test_cds_and_cgs(run, tmp_path, c1_file):
    L = tmp_path / "L.txt"
    L.write_text("3\n0 1 2\n1 2 0\n2 0 1\n")
    c2 = tmp_path / "c2.txt"
    c2.write_text("3\n. . .\n. 2 .\n. . 1\n")
    c3 = tmp_path / "c3.txt"
    c3.write_text("3\n0 . .\n. . .\n. . 1\n")
    out_dir = tmp_path / "cds"
    assert run("deal", "cds", "--square", L, "--critical", c1_file, "--critical", c2,
               "--critical", c3, "--out", out_dir)[0] == 0
    code, out, _ = run("recover", "--share", out_dir / "share-0.json", "--share", out_dir / "share-2.json")
    assert code == 0 and out == L.read_text()
    code, _, err = run("recover", "--share", out_dir / "share-1.json")
    assert code == 1 and "NotUnique" in err

    cgs_dir = tmp_path / "cgs"
    assert run("deal", "cgs", "--critical", c1_file, "--participants", 3, "--seed", 4, "--out", cgs_dir)[0] == 0
    shares = [cgs_dir / f"share-{i}.json" for i in range(3)]
    code, out, _ = run("combine", "cgs", *[x for s in shares for x in ("--share", s)])
    assert out == c1_file.read_text()
    code, out, _ = run("combine", "cgs", "--complete", *[x for s in shares for x in ("--share", s)])
    assert out == L.read_text()


def test_unseeded_prints_seed(run):
    code, _, err = run("ls", "gen", "--order", 4)
    assert code == 0 and err.startswith("seed: ")


def test_schema_error_exit_code(run, tmp_path):
    out_dir = tmp_path / "D"
    run("deal", "threshold", "--n", 2, "--t", 0, "--gen-square", "--seed", 3, "--out", out_dir)
    (out_dir / "store.json").write_text('{"version": "v0"}')
    code, _, err = run("recover", "--store", out_dir, "--share", out_dir / "share-0.json")
    assert code == 2 and "SchemaViolation" in err
