import math
import xml.etree.ElementTree as ET

import pytest

from tcmesh.svg import PlotSpec, emit_svg_scatter

NS = "{http://www.w3.org/2000/svg}"


def _parse(path):
    return ET.parse(path).getroot()


def test_empty_plot_has_axes(tmp_path):
    root = _parse(emit_svg_scatter([], PlotSpec(), tmp_path / "a.svg"))
    assert root.tag == NS + "svg"
    ids = {el.get("id") for el in root.iter(NS + "line")}
    assert {"x-axis", "y-axis"} <= ids
    assert list(root.iter(NS + "circle")) == []


def test_points_on_reference_line(tmp_path):
    pts = [(-0.2, -0.2), (0.05, 0.05), (0.3, 0.3)]
    root = _parse(emit_svg_scatter(pts, PlotSpec(reference_line=True), tmp_path / "b.svg"))
    line = next(el for el in root.iter(NS + "line") if el.get("id") == "reference")
    x1, y1, x2, y2 = (float(line.get(a)) for a in ("x1", "y1", "x2", "y2"))
    circles = list(root.iter(NS + "circle"))
    assert len(circles) == 3
    length = math.hypot(x2 - x1, y2 - y1)
    for c in circles:
        cx, cy = float(c.get("cx")), float(c.get("cy"))
        # perpendicular distance in pixels
        dist = abs((x2 - x1) * (y1 - cy) - (x1 - cx) * (y2 - y1)) / length
        assert dist < 1e-3
        assert min(x1, x2) <= cx <= max(x1, x2)


def test_points_off_line_detected(tmp_path):
    root = _parse(emit_svg_scatter([(0.1, -0.1), (0.2, 0.2)], PlotSpec(), tmp_path / "c.svg"))
    line = next(el for el in root.iter(NS + "line") if el.get("id") == "reference")
    x1, y1, x2, y2 = (float(line.get(a)) for a in ("x1", "y1", "x2", "y2"))
    c = next(iter(root.iter(NS + "circle")))
    cx, cy = float(c.get("cx")), float(c.get("cy"))
    assert abs((x2 - x1) * (y1 - cy) - (x1 - cx) * (y2 - y1)) > 1.0


def test_no_reference_line(tmp_path):
    root = _parse(emit_svg_scatter([(1.0, 2.0)], PlotSpec(reference_line=False, x_label="a<b"), tmp_path / "d.svg"))
    assert "reference" not in {el.get("id") for el in root.iter(NS + "line")}


@pytest.mark.parametrize("bad", [(math.nan, 0.0), (0.0, math.inf)])
def test_non_finite_rejected(tmp_path, bad):
    with pytest.raises(ValueError):
        emit_svg_scatter([(0.0, 0.0), bad], PlotSpec(), tmp_path / "e.svg")
    assert not (tmp_path / "e.svg").exists()


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_svg_scatter([], PlotSpec(), tmp_path / "missing" / "f.svg")
