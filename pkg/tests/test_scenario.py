"""Parameter model, config-file parsing, and preset construction."""
import math

import numpy as np
import pytest

from decwt.scenario import (
    ConfigBundle,
    ConfigParseError,
    GridSpec1D,
    GridSpec2D,
    InvalidParameterError,
    NumericsSpec,
    Scenario,
    characteristic_time,
    default_bundle,
    load_scenario,
    parse_config,
    preset_bundle,
    save_scenario,
)


def test_scenario_defaults_and_alpha0():
    s = Scenario(m=1.0, hbar=1.0, lam=1.0, b=1.0, sigma=1.0, t0=0.0, label="x")
    # alpha0 = 1/(4 b^2) for a real Gaussian of width b
    assert s.alpha0 == 0.25
    s2 = Scenario(m=1.0, hbar=1.0, lam=1.0, b=2.0, sigma=1.0, t0=0.0, label="x")
    assert s2.alpha0 == 1.0 / 16.0


@pytest.mark.parametrize("field,value,reported", [
    ("m", 0.0, "m"), ("m", -1.0, "m"), ("hbar", 0.0, "hbar"),
    ("b", -2.0, "b"), ("sigma", 0.0, "sigma"),
    ("lam", -0.5, "Lambda"),  # reported under its config-file key
])
def test_scenario_rejects_nonphysical(field, value, reported):
    kwargs = dict(m=1.0, hbar=1.0, lam=1.0, b=1.0, sigma=1.0, t0=0.0, label="x")
    kwargs[field] = value
    with pytest.raises(InvalidParameterError) as exc:
        Scenario(**kwargs)
    assert exc.value.field == reported


def test_characteristic_time_scaling():
    # t_b = hbar / (Lambda b^2): doubling b quarters it, doubling Lambda halves it
    s = Scenario(m=1.0, hbar=1.0, lam=2.0, b=1.0, sigma=1.0, t0=0.0, label="x")
    assert characteristic_time(s) == 0.5
    s = Scenario(m=1.0, hbar=3.0, lam=2.0, b=2.0, sigma=1.0, t0=0.0, label="x")
    assert characteristic_time(s) == 3.0 / 8.0
    free = Scenario(m=1.0, hbar=1.0, lam=0.0, b=1.0, sigma=1.0, t0=0.0, label="x")
    with pytest.raises(InvalidParameterError):
        characteristic_time(free)


def test_grid1d_points_and_wavenumbers():
    # the grid covers [-extent, extent) so the step is 2 extent / n
    g = GridSpec1D(n_points=8, extent=4.0)
    assert g.spacing == 1.0
    pts = g.points()
    assert len(pts) == 8
    assert pts[0] == -4.0
    assert pts[-1] == 3.0
    assert np.allclose(np.diff(pts), 1.0)
    # FFT wavenumber convention: k = 2 pi fftfreq(n, d)
    k = g.wavenumbers()
    assert np.allclose(k, 2.0 * np.pi * np.fft.fftfreq(8, d=1.0))


@pytest.mark.parametrize("n", [7, 12, 4, 0])
def test_grid1d_rejects_bad_sizes(n):
    with pytest.raises(InvalidParameterError):
        GridSpec1D(n_points=n, extent=4.0)


def test_grid2d_axes():
    g = GridSpec2D(n_y=16, n_z=32, extent_y=4.0, extent_z=8.0)
    assert g.axis_y.n_points == 16 and g.axis_y.extent == 4.0
    assert g.axis_z.n_points == 32 and g.axis_z.extent == 8.0


def test_numerics_validation():
    with pytest.raises(InvalidParameterError):
        NumericsSpec(dt=0.0, t_end=1.0)
    with pytest.raises(InvalidParameterError):
        NumericsSpec(dt=1e-3, t_end=-1.0)
    n = NumericsSpec(dt=1e-3, t_end=1.0)
    assert n.sample_every >= 1 and n.fit_window >= 3


CONFIG = """
# natural units
m = 1.0
hbar = 1.0
Lambda = 2.0
b = 1.5
label = demo
n_y = 64
n_z = 128
extent_y = 10.0
extent_z = 20.0
dt = 0.002
t_end = 1.5
"""


def test_parse_config_roundtrip_values():
    bundle = parse_config(CONFIG)
    assert bundle.scenario.lam == 2.0
    assert bundle.scenario.b == 1.5
    assert bundle.scenario.label == "demo"
    assert bundle.grid.n_y == 64 and bundle.grid.n_z == 128
    assert bundle.numerics.dt == 0.002 and bundle.numerics.t_end == 1.5


def test_parse_config_unknown_key_reports_line():
    text = "m = 1.0\nbogus = 3\n"
    with pytest.raises(ConfigParseError) as exc:
        parse_config(text)
    assert exc.value.line_no == 2
    assert "bogus" in str(exc.value)


def test_parse_config_duplicate_key_reports_line():
    text = "m = 1.0\nm = 2.0\n"
    with pytest.raises(ConfigParseError) as exc:
        parse_config(text)
    assert exc.value.line_no == 2


def test_parse_config_malformed_line():
    with pytest.raises(ConfigParseError) as exc:
        parse_config("m 1.0\n")
    assert exc.value.line_no == 1


def test_parse_config_bad_number_reports_line():
    with pytest.raises(ConfigParseError) as exc:
        parse_config("m = twelve\n")
    assert exc.value.line_no == 1


def test_save_load_roundtrip_is_bit_exact(tmp_path):
    bundle = parse_config(CONFIG)
    path = tmp_path / "scenario.cfg"
    save_scenario(path, bundle)
    back = load_scenario(path)
    assert back.scenario == bundle.scenario
    assert back.grid == bundle.grid
    # floats written with repr: a second save is byte-identical
    path2 = tmp_path / "again.cfg"
    save_scenario(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_roundtrip_preserves_awkward_floats(tmp_path):
    text = "dt = 1e-07\nt_end = 0.30000000000000004\n"
    bundle = parse_config(text)
    path = tmp_path / "s.cfg"
    save_scenario(path, bundle)
    back = load_scenario(path)
    assert back.numerics.dt == bundle.numerics.dt
    assert back.numerics.t_end == bundle.numerics.t_end


def test_default_bundle_is_valid():
    bundle = default_bundle()
    assert isinstance(bundle, ConfigBundle)
    assert bundle.grid.n_y >= 8
    assert bundle.numerics.t_end > 0


@pytest.mark.parametrize("name,lam", [("moderate", 1.0), ("strong", 10.0)])
def test_presets(name, lam):
    bundle = preset_bundle(name)
    s = bundle.scenario
    assert s.lam == lam
    assert s.m == s.hbar == s.b == 1.0
    assert bundle.grid.n_y == 512 and bundle.grid.n_z == 512
    assert bundle.numerics.dt == 1e-3 and bundle.numerics.t_end == 2.0
    # decoherence strength m Lambda b^4 / hbar^2 matches the preset name
    strength = s.m * s.lam * s.b ** 4 / s.hbar ** 2
    assert math.isclose(strength, lam)


def test_unknown_preset():
    with pytest.raises(InvalidParameterError):
        preset_bundle("extreme")
