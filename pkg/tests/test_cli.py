import subprocess
import sys

import pytest

from sumdist.cli import main
from sumdist.io import emit_events_csv, generate_synthetic, parse_distribution_csv, SyntheticConfig

from conftest import DATA

LOTTERY = str(DATA / "lottery.csv")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "bern05": "0,0.5\n1,0.5\n",
        "bern001": "0,0.999\n1,0.001\n",
        "die": "".join(f"{k},{1 / 6!r}\n" for k in range(1, 7)),
        "skewed": "0,0.7\n1,0.2\n5,0.1\n",
        "bad": "0,0.5\n0,0.5\n",
        "short": "0,0.4\n1,0.4\n",
    }.items():
        p = tmp_path / f"{name}.csv"
        p.write_text(text)
        paths[name] = str(p)
    events = tmp_path / "events.csv"
    events.write_text("item,visitor,compensation\nA,u1,1\nA,u2,2\nA,u3,1\nB,u1,2\nB,u2,2\nB,u3,2\n")
    paths["events"] = str(events)
    paths["dir"] = tmp_path
    return paths


class TestAlgebra:
    def test_power(self, capsys, files):
        code, out, _ = run(capsys, "power", files["bern05"], 2)
        assert code == 0 and out == "0,0.25\n1,0.5\n2,0.25\n"

    def test_power_large(self, capsys, files):
        code, out, _ = run(capsys, "power", files["bern001"], 5001)
        assert code == 0 and len(out.splitlines()) == 5002

    @pytest.mark.parametrize("n", ["0", "-1", "two"])
    def test_power_bad_n(self, capsys, files, n):
        with pytest.raises(SystemExit) as info:
            main(["power", files["bern05"], n])
        assert info.value.code == 2

    def test_convolve_and_subtract(self, capsys, files):
        code, out, _ = run(capsys, "convolve", files["bern05"], files["bern05"])
        assert code == 0 and out == "0,0.25\n1,0.5\n2,0.25\n"
        code, out, _ = run(capsys, "subtract", files["bern05"], files["bern05"])
        assert code == 0 and out == "-1,0.25\n0,0.5\n1,0.25\n"

    def test_out_file(self, capsys, files):
        target = files["dir"] / "o.csv"
        code, out, _ = run(capsys, "convolve", files["die"], files["die"], "--out", target, "--fft", "on")
        assert code == 0 and out == ""
        d = parse_distribution_csv(target.read_text())
        assert d.mass_at(7) == pytest.approx(1 / 6, rel=1e-12)

    def test_transform_identity(self, capsys, files):
        code, out, _ = run(capsys, "transform", files["skewed"], "--a", "1", "--b", "0")
        assert code == 0 and out == open(files["skewed"]).read()

    def test_transform_affine(self, capsys, files):
        code, out, _ = run(capsys, "transform", files["bern05"], "--a", "2", "--b", "-0.5")
        assert out == "-0.5,0.5\n1.5,0.5\n"
        code, _, err = run(capsys, "transform", files["bern05"], "--a", "0")
        assert code == 3 and "computation failed" in err

    def test_table(self, capsys, files):
        code, out, _ = run(capsys, "table", files["die"], "--width", "2")
        lines = out.splitlines()
        assert lines[0] == "lower,upper,probability"
        assert lines[1].startswith("0,2,")
        assert abs(sum(float(l.split(",")[2]) for l in lines[1:]) - 1) <= 1e-9

    def test_renormalize_flag(self, capsys, files):
        code, _, err = run(capsys, "power", files["short"], 2)
        assert code == 2 and "line" in err
        code, out, _ = run(capsys, "power", files["short"], 2, "--renormalize")
        assert code == 0 and out == "0,0.25\n1,0.5\n2,0.25\n"

    def test_prune_flag(self, capsys, files):
        code, out, _ = run(capsys, "power", files["bern001"], 50, "--prune-eps", "1e-20")
        assert code == 0 and len(out.splitlines()) < 51
        code, _, _ = run(capsys, "power", files["bern001"], 50, "--prune-eps", "-1")
        assert code == 2


class TestTail:
    def test_lottery_pipeline(self, capsys, files):
        ten = files["dir"] / "ten.csv"
        y = files["dir"] / "y.csv"
        assert run(capsys, "power", LOTTERY, 10, "--out", ten)[0] == 0
        assert run(capsys, "subtract", LOTTERY, ten, "--out", y)[0] == 0
        code, out, _ = run(capsys, "tail", y, "1", "--upper")
        assert code == 0 and f"{float(out):.5f}" == "0.03620"
        code, strict, _ = run(capsys, "tail", y, "0", "--upper", "--strict")
        assert strict == out
        code, out, _ = run(capsys, "tail", y, "-200", "--upper")
        assert float(out) == pytest.approx(0.7385, abs=5e-4)

    def test_ends(self, capsys, files):
        assert run(capsys, "tail", files["die"], "1", "--upper")[1] == "1\n"
        assert run(capsys, "tail", files["die"], "6", "--lower")[1] == "1\n"
        assert run(capsys, "tail", files["die"], "1", "--lower", "--strict")[1] == "0\n"

    def test_side_required(self, files):
        with pytest.raises(SystemExit) as info:
            main(["tail", files["die"], "1"])
        assert info.value.code == 2


class TestCheckClt:
    def test_pass(self, capsys, files):
        g200 = files["dir"] / "g200.csv"
        run(capsys, "power", files["bern05"], 200, "--out", g200)
        code, out, _ = run(capsys, "check-clt", g200)
        assert code == 0 and out.startswith("PASS skewness=")
        assert "excess_kurtosis=" in out

    def test_fail_and_thresholds(self, capsys, files):
        code, out, _ = run(capsys, "check-clt", files["skewed"])
        assert code == 0 and out.startswith("FAIL")
        code, out, _ = run(capsys, "check-clt", files["skewed"], "--skew-max", "100", "--kurt-max", "100")
        assert out.startswith("PASS")

    def test_point_mass(self, capsys, files):
        p = files["dir"] / "pm.csv"
        p.write_text("3,1\n")
        assert run(capsys, "check-clt", p)[0] == 3


class TestRarity:
    def test_toy_report(self, capsys, files):
        code, out, err = run(capsys, "rarity", files["events"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "item,n,t,avg_spend,p_t,p_z,log_ratio,l,l_prime"
        a = lines[1].split(",")
        b = lines[2].split(",")
        assert float(a[4]) == pytest.approx(1 - (1 / 3) ** 3, rel=1e-14)
        assert float(b[4]) == pytest.approx((2 / 3) ** 3, rel=1e-14)
        assert "scored 2 items" in err

    def test_sections(self, capsys, files):
        code, out, _ = run(capsys, "rarity", files["events"], "--pr-curve", "0:3:0.5",
                           "--divergence", "--rare-cutoff", "0.5")
        report, pr, div = out.split("\n\n")
        assert pr.splitlines()[0] == "a,precision,recall"
        assert len(pr.splitlines()) == 8
        assert div.splitlines()[0] == "n,log_ratio"

    def test_quarantine(self, capsys, files):
        ev = files["dir"] / "q.csv"
        ev.write_text(open(files["events"]).read() + "C,u1,2\nC,u2,2\nC,u3,9\n")
        model = files["dir"] / "capped.csv"
        model.write_text("1,0.4\n2,0.6\n")
        # the empirical model covers every observed total
        assert "quarantined 0" in run(capsys, "rarity", ev)[2]
        code, out, err = run(capsys, "rarity", ev, "--model", model)
        assert code == 0 and "quarantined C" in err
        assert len(out.splitlines()) == 3
        qfile = files["dir"] / "quarantine.csv"
        code, _, _ = run(capsys, "rarity", ev, "--model", model, "--quarantine", qfile)
        assert qfile.read_text().splitlines()[1].startswith("C,3,13,")

    def test_min_visitors(self, capsys, files):
        code, out, err = run(capsys, "rarity", files["events"], "--min-visitors", "4")
        assert code == 0 and out.splitlines() == ["item,n,t,avg_spend,p_t,p_z,log_ratio,l,l_prime"]
        assert "excluded 2" in err

    def test_dedupe(self, capsys, files):
        ev = files["dir"] / "d.csv"
        ev.write_text(open(files["events"]).read() + "A,u1,1\n")
        out_dup = run(capsys, "rarity", ev)[1]
        out_dedupe = run(capsys, "rarity", ev, "--dedupe")[1]
        assert out_dup.splitlines()[1].startswith("A,4,5,")
        assert out_dedupe.splitlines()[1].startswith("A,3,4,")

    @pytest.mark.parametrize("text", ["A,u1,1\n", "item,visitor,compensation\nA,u1,x\n"])
    def test_bad_events(self, capsys, files, text):
        ev = files["dir"] / "bad_events.csv"
        ev.write_text(text)
        assert run(capsys, "rarity", ev)[0] == 2

    def test_bad_pr_spec(self, capsys, files):
        assert run(capsys, "rarity", files["events"], "--pr-curve", "3:1:1")[0] == 2
        assert run(capsys, "rarity", files["events"], "--pr-curve", "nope")[0] == 2

    def test_synthetic_divergence(self, capsys, files):
        ev = files["dir"] / "synth.csv"
        assert run(capsys, "gen-synth", "--items", 400, "--seed", 1, "--out", ev)[0] == 0
        code, out, _ = run(capsys, "rarity", ev, "--divergence")
        rows = out.split("\n\n")[1].splitlines()[1:]
        pairs = [(int(n), abs(float(v))) for n, v in (r.split(",") for r in rows)]
        small = [v for n, v in pairs if n <= 5]
        large = [v for n, v in pairs if n >= 20]
        assert small and large
        assert max(large) < max(small)


class TestGeneral:
    def test_missing_file(self, capsys, files):
        code, _, err = run(capsys, "power", files["dir"] / "nope.csv", 2)
        assert code == 2 and "nope.csv" in err

    def test_parse_error(self, capsys, files):
        code, _, err = run(capsys, "power", files["bad"], 2)
        assert code == 2 and "line 2" in err

    def test_gen_synth(self, capsys, files):
        code, out, _ = run(capsys, "gen-synth", "--items", 3, "--seed", 7)
        assert code == 0 and out.startswith("item,visitor,compensation\n")
        assert out == emit_events_csv(generate_synthetic(SyntheticConfig(3, random_seed=7)))
        assert run(capsys, "gen-synth", "--items", "-1")[0] == 2

    def test_gen_synth_custom(self, capsys, files):
        code, out, _ = run(capsys, "gen-synth", "--items", 2, "--compensation", files["bern05"],
                           "--visitors", files["die"])
        assert code == 0
        assert {l.split(",")[2] for l in out.splitlines()[1:]} <= {"0", "1"}

    def test_byte_identical_runs(self, files):
        ev = files["dir"] / "det.csv"
        main(["gen-synth", "--items", "200", "--seed", "3", "--out", str(ev)])
        outs = []
        for k in range(2):
            target = files["dir"] / f"rep{k}.csv"
            assert main(["rarity", str(ev), "--pr-curve", "0:5:0.25", "--divergence",
                         "--out", str(target)]) == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]

    def test_entry_point(self, files):
        proc = subprocess.run([sys.executable, "-m", "sumdist.cli", "power", files["bern05"], "2"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout == "0,0.25\n1,0.5\n2,0.25\n"
        proc = subprocess.run([sys.executable, "-m", "sumdist.cli", "power", files["bern05"], "0"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
