import numpy as np
import pytest

from betafinsler import fields as fld
from betafinsler.errors import ConfigError
from betafinsler.jets import lift_x


def test_general_table_evaluation_and_jacobian():
    f = fld.from_spec({"const": [1.0, 0.0], "linear": [[0, 2.0], [0, 0]],
                       "quadratic": [[[0, 0], [0, 0]], [[3.0, 0], [0, 0]]]}, 2, "q")
    x = np.array([0.5, -1.0])
    assert np.allclose(f.value(x), [1.0 - 2.0, 3.0 * 0.25])
    assert np.allclose(f.jacobian(x), [[0.0, 2.0], [6.0 * 0.5, 0.0]])
    assert np.allclose([c.value for c in f(lift_x(x))], f.value(x))
    assert fld.from_spec(f.to_dict(), 2).value(x) == pytest.approx(f.value(x))


def test_shorthands_are_one_based():
    t = fld.from_spec({"kind": "translation", "axis": 3}, 3)
    assert np.allclose(t.value(np.zeros(3)), [0, 0, 1])
    r = fld.from_spec({"kind": "rotation", "plane": [1, 2]}, 3)
    assert np.allclose(r.value([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0])
    assert r.name == "rotation-12"
    assert np.allclose(fld.from_spec({"kind": "dilation"}, 2).jacobian([0, 0]), np.eye(2))
    assert not np.any(fld.from_spec({"kind": "zero"}, 2).value([1, 1]))


@pytest.mark.parametrize("spec", [
    {"kind": "translation", "axis": 0},
    {"kind": "translation", "axis": 4},
    {"kind": "translation"},
    {"kind": "rotation", "plane": [2, 2]},
    {"kind": "rotation", "plane": [1, 5]},
    {"kind": "spiral"},
    {"const": [1.0, 2.0]},
    {"const": [1.0, "a", 0.0]},
    {"const": [1.0, float("inf"), 0.0]},
    [1.0, 0.0, 0.0],
])
def test_invalid_specs(spec):
    with pytest.raises(ConfigError):
        fld.from_spec(spec, 3, "v")
