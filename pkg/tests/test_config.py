import numpy as np
import pytest

from lvie.config import ConfigError, load_problem_config, parse_problem_config

GOOD = """
# a variant of the first benchmark problem
name   = "custom"
t0     = 0.0
T      = 1.0
lambda = 0.25
a0     = "t^2+1"
kernel = "t-2*s^2"
f      = "cos(t)"
exact  = "cos(t)"
load   = { point = 0.3, coeff = "1-t^3" }
load   = { point = 0.5, coeff = "t-2" }
"""


def test_parse_full_file():
    p = parse_problem_config(GOOD)
    assert p.name == "custom"
    assert (p.t0, p.T, p.lam) == (0.0, 1.0, 0.25)
    assert len(p.loads) == 2
    assert p.loads[0].point == 0.3
    assert p.loads[1].coeff(0.0) == -2.0
    assert p.kernel(1.0, 0.5) == 0.5
    assert p.exact(0.0) == 1.0


def test_loads_optional():
    text = "\n".join(
        line for line in GOOD.splitlines() if not line.startswith("load")
    )
    p = parse_problem_config(text)
    assert p.loads == ()


def test_exact_optional():
    text = "\n".join(
        line for line in GOOD.splitlines() if not line.startswith("exact")
    )
    assert parse_problem_config(text).exact is None


def test_missing_required_key():
    text = "\n".join(
        line for line in GOOD.splitlines() if not line.startswith("kernel")
    )
    with pytest.raises(ConfigError, match="missing required keys: kernel"):
        parse_problem_config(text)


def test_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate key"):
        parse_problem_config(GOOD + '\nt0 = 0.5\n')


def test_unknown_key():
    with pytest.raises(ConfigError, match="unknown key 'kernle'"):
        parse_problem_config('kernle = "t"')


def test_bad_expression_reports_line():
    bad = GOOD.replace('"t^2+1"', '"t^2+"')
    with pytest.raises(ConfigError, match="bad expression for 'a0'"):
        parse_problem_config(bad)


def test_malformed_load():
    with pytest.raises(ConfigError, match="load"):
        parse_problem_config('load = { point = 0.3 }')


def test_load_point_must_be_number():
    with pytest.raises(ConfigError, match="point must be a number"):
        parse_problem_config('load = { point = "0.3", coeff = "t" }')


def test_comment_inside_string_kept():
    p = parse_problem_config(GOOD.replace('"custom"', '"about # half"'))
    assert p.name == "about # half"


def test_number_where_string_expected():
    with pytest.raises(ConfigError, match="quoted expression"):
        parse_problem_config("a0 = 3.0")


def test_load_file(tmp_path):
    path = tmp_path / "wobble.cfg"
    path.write_text(GOOD.replace('name   = "custom"\n', ""), encoding="utf-8")
    p = load_problem_config(path)
    assert p.name == "wobble"
    np.testing.assert_allclose(p.a0(np.array([0.0, 1.0])), [1.0, 2.0])
