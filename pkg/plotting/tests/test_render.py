"""Rendering tests: output files, panel behavior, warnings, determinism."""
import warnings

import pytest

from plots.render import PlotJob, render, render_learning, render_sweep
from plots.schema import LEARNING_COLUMNS, SWEEP_COLUMNS, NoData


def _write(path, header, rows):
    lines = [",".join(header)] + [",".join(str(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def _sweep_csv(tmp_path, params=("gamma",), values=(0.1, 0.5, 0.9)):
    path = tmp_path / "sweep.csv"
    rows = []
    for param in params:
        for v in values:
            for mode, frac in (("equal", 0.2), ("range", 0.6)):
                rows.append((param, v, mode, 50, frac, frac - 0.1, frac + 0.1, 0))
    _write(path, SWEEP_COLUMNS, rows)
    return path


def _learning_csv(tmp_path, series=("designed", "goal")):
    path = tmp_path / "learn.csv"
    rows = []
    for name in series:
        for run in range(3):
            for ep in range(5):
                rows.append((name, run, ep, 0.5 + 0.05 * ep))
    _write(path, LEARNING_COLUMNS, rows)
    return path


def _is_png(path):
    return path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_sweep_multi_panel(tmp_path):
    csv_path = _sweep_csv(tmp_path, params=("gamma", "n_states"))
    out = tmp_path / "sweep.png"
    assert render_sweep(str(csv_path), str(out)) == str(out)
    assert _is_png(out)


def test_render_sweep_single_point(tmp_path):
    csv_path = _sweep_csv(tmp_path, values=(0.5,))
    out = tmp_path / "point.png"
    render_sweep(str(csv_path), str(out))
    assert _is_png(out)


def test_render_sweep_empty_csv(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(NoData):
        render_sweep(str(path), str(tmp_path / "x.png"))


def test_render_learning_two_series(tmp_path):
    csv_path = _learning_csv(tmp_path)
    out = tmp_path / "learn.png"
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # both series present, no warning
        render_learning(str(csv_path), str(out))
    assert _is_png(out)


def test_render_learning_missing_series_warns(tmp_path):
    csv_path = _learning_csv(tmp_path, series=("designed",))
    out = tmp_path / "single.png"
    with pytest.warns(UserWarning, match="goal"):
        render_learning(str(csv_path), str(out))
    assert _is_png(out)


def test_render_learning_constant_metric(tmp_path):
    path = tmp_path / "flat.csv"
    rows = [("designed", r, e, 0.8) for r in range(2) for e in range(4)]
    rows += [("goal", r, e, 0.8) for r in range(2) for e in range(4)]
    _write(path, LEARNING_COLUMNS, rows)
    out = tmp_path / "flat.png"
    render_learning(str(path), str(out))
    assert _is_png(out)


def test_render_dispatch(tmp_path):
    csv_path = _sweep_csv(tmp_path)
    out = tmp_path / "d.png"
    render(PlotJob(str(csv_path), str(out), "sweep"))
    assert _is_png(out)
    with pytest.raises(ValueError):
        render(PlotJob(str(csv_path), str(out), "pie"))


def test_rerender_is_byte_stable(tmp_path):
    csv_path = _sweep_csv(tmp_path)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render_sweep(str(csv_path), str(a))
    render_sweep(str(csv_path), str(b))
    assert a.read_bytes() == b.read_bytes()
