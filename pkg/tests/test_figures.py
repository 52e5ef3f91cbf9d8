from cascadelab.figures import render_sweep_figure
from cascadelab.model import ThresholdPoint
from cascadelab.sweep import SweepRow


def row(method, eps, value, lower=None, upper=None):
    return SweepRow(eps=eps, beta=0.1, p=0.7, v="B", method=method,
                    value=value, lower=lower, upper=upper)


def test_render_writes_a_png(tmp_path):
    rows = {
        "exact": [row("exact", e, v, v - 0.01, v + 0.01)
                  for e, v in ((0.0, 0.2), (0.1, 0.25), (0.2, 0.18))],
        "mc": [row("mc", e, v) for e, v in ((0.0, 0.21), (0.1, 0.24))],
    }
    out = render_sweep_figure(
        rows,
        tmp_path / "fig.png",
        thresholds=[ThresholdPoint(r=2, k=0, eps_value=0.15),
                    ThresholdPoint(r=3, k=1, eps_value=0.05)],
        drops=[(0.15, 0.07)],
        title="demo sweep",
    )
    assert out == tmp_path / "fig.png"
    assert out.stat().st_size > 1000


def test_render_skips_marker_rows(tmp_path):
    rows = {"sequence": [
        row("sequence", 0.0, None),
        row("sequence", 0.1, 0.2, lower=0.2),
        row("sequence", 0.2, None),
    ]}
    out = render_sweep_figure(rows, tmp_path / "fig2.png")
    assert out.exists()
