import json

from gmpy2 import mpfr

from boxeig.cli import EXIT_CONFIG, EXIT_OK, main

from conftest import digits_match


def run(tmp_path, *argv, name="out.txt"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


class TestSolve:
    def test_free_particle_jsonl(self, tmp_path):
        code, text = run(tmp_path, "solve", "--potential", "0", "--L", "2",
                         "--digits", "20", "--count", "2")
        assert code == EXIT_OK
        rows = [json.loads(line) for line in text.splitlines()]
        assert len(rows) == 2
        # (pi/4)^2 and (pi/2)^2
        assert digits_match(mpfr(rows[0]["energy"], 120),
                            "0.61685027506808491368")
        assert digits_match(mpfr(rows[1]["energy"], 120),
                            "2.4674011002723396547")
        assert rows[0]["kind"] == "even" and rows[1]["kind"] == "odd"
        assert rows[0]["converged"] and rows[1]["converged"]

    def test_quartic_csv_fixed_terms(self, tmp_path):
        code, text = run(tmp_path, "solve", "--potential", "x^2+x^4",
                         "--L", "3", "--digits", "8", "--count", "1",
                         "--kind", "even", "--terms", "60",
                         "--range", "1:2:0.1", "--output", "csv")
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0].startswith("energy,kind,index,terms")
        fields = lines[1].split(",")
        assert fields[0].startswith("1.392351")
        assert fields[3] == "60"

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "job.ini"
        cfg.write_text("[job]\npotential = 0\nL = 2\ndigits = 10\ncount = 1\n")
        code, text = run(tmp_path, "solve", "--config", str(cfg),
                         "--digits", "15")
        assert code == EXIT_OK
        row = json.loads(text.splitlines()[0])
        assert row["digits"] == 15

    def test_bad_potential_is_config_error(self, tmp_path):
        code, _ = run(tmp_path, "solve", "--potential", "x^-2", "--L", "2")
        assert code == EXIT_CONFIG

    def test_missing_L_is_config_error(self, tmp_path):
        code, _ = run(tmp_path, "solve", "--potential", "0")
        assert code == EXIT_CONFIG

    def test_parity_kind_rejected_for_asymmetric(self, tmp_path):
        code, _ = run(tmp_path, "solve", "--potential", "x^3", "--L", "1",
                      "--kind", "even")
        assert code == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        code, _ = run(tmp_path, "solve", "--config",
                      str(tmp_path / "nope.ini"))
        assert code == EXIT_CONFIG


class TestScan:
    def test_grid_and_bracket_rows(self, tmp_path):
        code, text = run(tmp_path, "scan", "--potential", "0", "--L", "2",
                         "--digits", "10", "--range", "0:1:0.1",
                         "--output", "csv")
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0] == "E,value"
        bracket_lines = [l for l in lines if l.startswith("# bracket,")]
        assert len(bracket_lines) == 1
        _, lo, hi, kind = bracket_lines[0].split(",")
        assert float(lo) < 0.6168503 < float(hi)
        assert kind == "even"

    def test_jsonl_output(self, tmp_path):
        code, text = run(tmp_path, "scan", "--potential", "0", "--L", "2",
                         "--digits", "10", "--range", "0:1:0.25")
        assert code == EXIT_OK
        rows = [json.loads(line) for line in text.splitlines()]
        assert any("bracket" in r for r in rows)
        assert sum("E" in r for r in rows) == 5

    def test_requires_range(self, tmp_path):
        code, _ = run(tmp_path, "scan", "--potential", "0", "--L", "2")
        assert code == EXIT_CONFIG


class TestSplit:
    def test_shallow_well(self, tmp_path):
        code, text = run(tmp_path, "split", "--mu2", "5", "--L", "6",
                         "--digits", "30")
        assert code == EXIT_OK
        row = json.loads(text.splitlines()[0])
        assert row["mu2"] == "5"
        assert digits_match(mpfr(row["e_plus"]["energy"], 200),
                            "-3.4101427612398294")
        assert digits_match(mpfr(row["e_minus"]["energy"], 200),
                            "-3.2506753622892359")

    def test_requires_positive_mu2(self, tmp_path):
        code, _ = run(tmp_path, "split", "--mu2", "-3", "--L", "6")
        assert code == EXIT_CONFIG


class TestPlotdata:
    def test_custom_wavefunction_dump(self, tmp_path):
        out = tmp_path / "plots"
        code = main(["plotdata", "--potential", "0", "--L", "2",
                     "--digits", "15", "--energy", "0.61685027506808491",
                     "--kind", "even", "--npoints", "11",
                     "--outdir", str(out)])
        assert code == EXIT_OK
        text = (out / "wavefunction.csv").read_text()
        lines = text.splitlines()
        assert lines[0].startswith("# potential=0, L=2")
        assert lines[1] == "x,psi"
        assert len(lines) == 13
        # walls: psi ~ 0 at both ends
        for row in (lines[2], lines[-1]):
            psi = float(row.split(",")[1])
            assert abs(psi) < 1e-10

    def test_unknown_recipe(self, tmp_path):
        code = main(["plotdata", "--recipe", "fig9", "--outdir",
                     str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_custom_needs_energy(self, tmp_path):
        code = main(["plotdata", "--potential", "0", "--L", "2",
                     "--outdir", str(tmp_path)])
        assert code == EXIT_CONFIG


class TestOracle:
    def test_free_particle_table(self, tmp_path):
        code, text = run(tmp_path, "oracle", "--potential", "0", "--L", "2",
                         "--digits", "20", "--count", "2")
        assert code == EXIT_OK
        lines = text.splitlines()
        assert lines[0] == "n,series,fd,fd_agree,exact,exact_agree"
        for line in lines[1:]:
            fields = line.split(",")
            assert int(fields[3]) >= 5       # fd agrees to >= 5 digits
            assert int(fields[5]) >= 19      # closed form to target
