import io
import json
import subprocess
import sys

import jsonschema
import pytest

from qhodge.cache import GBCache, set_default_cache
from qhodge.cli import load_schema, run

CUSP_RES = "2 1\n3 2\n6 4\n"


@pytest.fixture(autouse=True)
def _fresh_cache():
    set_default_cache(GBCache(None))
    yield
    set_default_cache(GBCache(None))


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, _ = invoke(*argv, "--format", "json")
    return code, json.loads(out)


@pytest.fixture
def resolution_file(tmp_path):
    path = tmp_path / "cusp.res"
    path.write_text(CUSP_RES)
    return str(path)


def command_lines(resolution):
    return [
        ["bf", "x^2+y^3"],
        ["min-exp", "x"],
        ["lct", "x^2+y^3"],
        ["hodge", "x^2+y^3", "--alpha", "1/1", "--p", "2"],
        ["hodge", "x^2+y^3", "--alpha", "1", "--p", "1", "--tilde"],
        ["jumps", "x^2+y^3", "--p", "1"],
        ["vmember", "x^2+y^3", "--gamma", "5/6", "--elem", "1"],
        ["vmember", "x^2+y^3", "--gamma", "1/6", "--elem", "0,1", "--method", "linear"],
        ["verify-identities"],
        ["lichtin", "x^2+y^3", "--resolution", resolution],
        ["ts-check", "x^2", "y^3"],
        ["bounds-check", "x^2+y^3"],
        ["report", "x^2+y^3", "--alpha", "1", "--p", "2"],
    ]


class TestText:
    def test_bf(self):
        code, out, _ = invoke("bf", "x^2+y^3")
        assert code == 0 and out.strip() == "(s+1)(s+5/6)(s+7/6)"

    def test_min_exp(self):
        assert invoke("min-exp", "x")[1].strip() == "infinity"
        assert invoke("min-exp", "x^2+y^3")[1].strip() == "5/6"

    def test_lct(self):
        assert invoke("lct", "x^2+y^3")[1].strip() == "5/6"


class TestJson:
    def test_hodge_cusp(self):
        code, data = invoke_json("hodge", "x^2+y^3", "--alpha", "1/1", "--p", "2")
        assert code == 0
        from qhodge.polyring import IdealGens, ideal_equal, parse_poly

        got = IdealGens.of([parse_poly(g, 2) for g in data["ideal"]])
        want = IdealGens.of([parse_poly(g, 2) for g in ["x^3", "x^2*y^2", "x*y^3", "y^4-3*x^2*y"]])
        assert ideal_equal(got, want)

    def test_every_output_validates(self, resolution_file):
        for argv in command_lines(resolution_file):
            code, data = invoke_json(*argv)
            assert code == 0, argv
            jsonschema.validate(data, load_schema(data["command"]))

    @pytest.mark.parametrize(
        "argv, kind",
        [
            (["hodge", "x^2", "--alpha", "1", "--p", "0"], "precondition"),
            (["bf", "1"], "precondition"),
            (["bf", "x^^2"], "precondition"),
            (["bf", "x^2+y^3", "--max-pairs", "2"], "resource_limit"),
        ],
    )
    def test_error_payloads(self, argv, kind):
        code, data = invoke_json(*argv)
        assert data["error"]["kind"] == kind
        jsonschema.validate(data, load_schema("error"))

    def test_parse_error_position(self):
        _, data = invoke_json("bf", "x^^2")
        assert data["error"]["position"] == 2


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv, code",
        [
            (["bf", "x^2+y^3"], 0),
            (["hodge", "x^2", "--alpha", "1", "--p", "0"], 2),
            (["bf", "1"], 2),
            (["bf", "x^^2"], 2),
            (["ts-check", "x+1", "y"], 2),
            (["bounds-check", "x"], 2),
            (["lichtin", "x", "--resolution", "/nonexistent/file"], 2),
            (["bf", "x^2+y^3", "--max-pairs", "2"], 3),
        ],
    )
    def test_codes(self, argv, code):
        assert invoke(*argv)[0] == code

    def test_errors_go_to_stderr(self):
        code, out, err = invoke("bf", "1")
        assert code == 2 and out == "" and err.startswith("error:")

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qhodge", "bf", "x^2+y^3"], capture_output=True, text=True, check=False
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "(s+1)(s+5/6)(s+7/6)"


class TestDeterminism:
    def test_repeat_runs_identical(self, resolution_file):
        for argv in command_lines(resolution_file):
            first = invoke(*argv, "--format", "json")[1]
            set_default_cache(GBCache(None))
            second = invoke(*argv, "--format", "json")[1]
            assert first == second, argv


class TestCache:
    def _gb_files(self, directory):
        return sorted(p for p in directory.iterdir() if p.suffix == ".gb")

    def test_store_then_load_is_byte_identical(self, tmp_path):
        from qhodge.bsato import delta_gb
        from qhodge.polyring import parse_poly

        f = parse_poly("x^2+y^3", 2)
        cold = GBCache(tmp_path)
        delta_gb(f, cache=cold)
        (path,) = self._gb_files(tmp_path)
        stored = path.read_text()
        warm = GBCache(tmp_path)
        gb = delta_gb(f, cache=warm)
        assert warm.hits == 1 and warm.misses == 0
        header = stored.partition("---\n")[0]
        assert warm.serialize(header, gb) == stored

    def test_cold_and_warm_output_identical(self, tmp_path):
        cold = invoke("bf", "x^2+y^3", "--cache-dir", str(tmp_path))
        assert self._gb_files(tmp_path)
        warm = invoke("bf", "x^2+y^3", "--cache-dir", str(tmp_path))
        assert cold == warm

    def test_tampered_entry_is_recomputed(self, tmp_path, caplog):
        cold = invoke("bf", "x^2+y^3", "--cache-dir", str(tmp_path))
        for path in self._gb_files(tmp_path):
            text = path.read_text()
            path.write_text(text.replace("1", "2", 1))
        with caplog.at_level("WARNING"):
            again = invoke("bf", "x^2+y^3", "--cache-dir", str(tmp_path))
        assert again == cold
        assert any("discarding cache entry" in r.getMessage() for r in caplog.records)

    def test_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QHODGE_CACHE_DIR", str(tmp_path))
        cache = GBCache.from_env()
        assert cache.directory == tmp_path
