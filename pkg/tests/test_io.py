import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from entkit import io as fmt
from entkit.decomp import cvl_forward
from entkit.errors import ValidationError
from entkit.instances import random_density, random_range_basis, random_state
from entkit.observables import Observable


def write(tmp_path, doc, name="f.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_bundled_files_parse(data_dir):
    s2 = fmt.load_state(data_dir / "s2_bell.json")
    np.testing.assert_allclose(s2.coeffs, np.eye(2) / np.sqrt(2))
    s4 = fmt.load_state(data_dir / "s4_rank2_3x3.json")
    assert s4.coeffs.shape == (3, 3)
    d = fmt.load_decomposition(data_dir / "decomp_hadamard_s3.json")
    np.testing.assert_allclose(d.density(), np.diag([0.75, 0.25]), atol=1e-15)
    assert fmt.load_observable(data_dir / "observable_z2.json").subsystem_tag == 2
    assert fmt.load_basis(data_dir / "basis_standard3.json").shape == (3, 3)
    np.testing.assert_allclose(fmt.load_vector(data_dir / "vector_chi.json"), [0.6, 0.8j])
    np.testing.assert_allclose(fmt.load_matrix(data_dir / "rho_diag.json"), np.diag([0.75, 0.25]))


@settings(max_examples=30, deadline=None)
@given(d1=hst.integers(1, 5), d2=hst.integers(1, 5), seed=hst.integers(0, 2**32 - 1))
def test_state_round_trip_is_bit_exact(d1, d2, seed):
    s = random_state(np.random.default_rng(seed), d1, d2)
    text = fmt.dumps(fmt.state_to_dict(s, label="x"))
    back = fmt.state_from_dict(json.loads(text))
    # renormalization divides by a norm that is 1 to within an ulp or two
    assert np.max(np.abs(back.coeffs - s.coeffs)) < 1e-15
    assert fmt.dumps(fmt.state_to_dict(fmt.state_from_dict(json.loads(text)), label="x")) == fmt.dumps(
        fmt.state_to_dict(back, label="x")
    )


def test_vector_encoding_is_exact(rng):
    v = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    text = fmt.dumps({"vector": fmt.encode_vector(v)})
    assert np.array_equal(fmt.vector_from_dict(json.loads(text)), v)


def test_decomposition_and_observable_round_trip(rng):
    rho = random_density(rng, 3)
    d = cvl_forward(rho, random_range_basis(rng, rho))
    back = fmt.decomposition_from_dict(json.loads(fmt.dumps(fmt.decomposition_to_dict(d))))
    assert np.array_equal(back.weights, d.weights)
    assert np.array_equal(back.vectors, d.vectors)
    a = Observable(np.array([[1.0, 2j], [-2j, 0.5]]), 2)
    b = fmt.observable_from_dict(json.loads(fmt.dumps(fmt.observable_to_dict(a))))
    assert np.array_equal(b.matrix, a.matrix) and b.subsystem_tag == 2


def test_negative_zero_is_folded():
    assert fmt.encode_complex(complex(-0.0, -0.0)) == [0.0, 0.0]
    assert "-0.0" not in fmt.dumps(fmt.encode_vector(np.array([-0.0])))


def test_dumps_rejects_non_finite():
    with pytest.raises(ValueError):
        fmt.dumps({"x": float("nan")})


def test_floats_keep_full_precision():
    x = 0.1 + 0.2
    assert json.loads(fmt.dumps(fmt.encode_complex(x)))[0] == x


# --- diagnostics ------------------------------------------------------------


def test_json_syntax_error_reports_line_and_column(tmp_path):
    path = write(tmp_path, '{\n  "d1": 2,\n  "d2": 2\n  "coefficients": []\n}')
    with pytest.raises(fmt.FormatError) as exc:
        fmt.load_state(path)
    assert exc.value.where == f"{path}:4:3"


def test_missing_field_is_named(tmp_path):
    path = write(tmp_path, {"d1": 1, "coefficients": [[[1, 0]]]})
    with pytest.raises(fmt.FormatError, match="missing field 'd2'"):
        fmt.load_state(path)


def test_bad_entry_reports_field_path(tmp_path):
    path = write(tmp_path, {"d1": 2, "d2": 1, "coefficients": [[[1, 0]], [["x", 0]]]})
    with pytest.raises(fmt.FormatError) as exc:
        fmt.load_state(path)
    assert exc.value.where == f"{path}.coefficients[1][0][0]"


def test_shape_mismatch(tmp_path):
    path = write(tmp_path, {"d1": 2, "d2": 2, "coefficients": [[[1, 0], [0, 0]]]})
    with pytest.raises(fmt.FormatError, match="expected 2 rows"):
        fmt.load_state(path)


def test_unnormalized_state_is_rejected_with_norm(tmp_path):
    path = write(tmp_path, {"d1": 1, "d2": 2, "coefficients": [[[1, 0], [1, 0]]]})
    with pytest.raises(fmt.FormatError, match=r"norm = 1\.4142135623730951"):
        fmt.load_state(path)


def test_norm_tolerance_edges(tmp_path):
    ok = write(tmp_path, {"d1": 1, "d2": 1, "coefficients": [[[1 + 5e-9, 0]]]}, "ok.json")
    assert fmt.load_state(ok).coeffs[0, 0] == 1.0
    bad = write(tmp_path, {"d1": 1, "d2": 1, "coefficients": [[[1 + 5e-8, 0]]]}, "bad.json")
    with pytest.raises(fmt.FormatError):
        fmt.load_state(bad)


def test_tolerance_scale_does_not_loosen_file_norm(tmp_path, monkeypatch):
    monkeypatch.setenv("ENTKIT_TOLERANCE_SCALE", "1e6")
    bad = write(tmp_path, {"d1": 1, "d2": 1, "coefficients": [[[1 + 5e-8, 0]]]})
    with pytest.raises(fmt.FormatError, match="not normalized"):
        fmt.load_state(bad)


def test_invalid_decomposition_is_a_format_error(tmp_path):
    path = write(tmp_path, {"dim": 1, "terms": [{"weight": 0.5, "vector": [[1, 0]]}]})
    with pytest.raises(fmt.FormatError, match="sum"):
        fmt.load_decomposition(path)


def test_non_hermitian_observable(tmp_path):
    path = write(tmp_path, {"dim": 2, "subsystem": 1, "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]})
    with pytest.raises(fmt.FormatError, match="Hermitian"):
        fmt.load_observable(path)


def test_unreadable_file(tmp_path):
    with pytest.raises(fmt.FormatError, match="cannot read"):
        fmt.load_state(tmp_path / "absent.json")


def test_format_error_is_validation_error():
    assert issubclass(fmt.FormatError, ValidationError)
    with pytest.raises(fmt.FormatError):
        fmt.decode_complex([1, True], "z")
    with pytest.raises(fmt.FormatError):
        fmt.decomposition_from_dict([], "d")
