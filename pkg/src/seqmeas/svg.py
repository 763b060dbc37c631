"""SVG vector diagrams of two-dimensional scenarios.

The object's initial state is drawn in black, each measurement state as a
colored labeled vector, and each distinct final state as a grey vector.
States are drawn from their phase-canonical form; a state with a significant
imaginary part cannot be drawn faithfully in the plane, so only its real part
is shown, dashed.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .exceptions import DimensionMismatchError
from .hilbert import phase_equal

SVG_NS = "http://www.w3.org/2000/svg"
PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
           "#17becf", "#bcbd22", "#7f7f7f")
INITIAL_COLOR = "#000000"
FINAL_COLOR = "#9e9e9e"


def distinct_final_states(dist, tol=1e-9) -> list:
    """Final states of ``dist`` with phase-equal duplicates removed, in outcome order."""
    found = []
    for o in dist:
        if not any(phase_equal(o.final_state, s, tol) for s in found):
            found.append(o.final_state)
    return found


def _xy(state):
    amps = state.canonical().amplitudes
    return float(amps[0].real), float(amps[1].real), bool(np.any(np.abs(amps.imag) > 1e-9))


def render_svg(initial_state, device, dist=None, size: int = 400, colors=PALETTE) -> str:
    """Return an SVG 1.1 document for a 2-d scenario and (optionally) its outcomes."""
    if initial_state.dim != 2 or device.dim != 2:
        raise DimensionMismatchError("SVG diagrams need a 2-dimensional scenario")
    ET.register_namespace("", SVG_NS)
    c = size / 2
    scale = size * 0.4
    root = ET.Element(f"{{{SVG_NS}}}svg", {
        "version": "1.1", "width": str(size), "height": str(size),
        "viewBox": f"0 0 {size} {size}",
    })
    defs = ET.SubElement(root, f"{{{SVG_NS}}}defs")
    marker = ET.SubElement(defs, f"{{{SVG_NS}}}marker", {
        "id": "arrow", "viewBox": "0 0 10 10", "refX": "10", "refY": "5",
        "markerWidth": "6", "markerHeight": "6", "orient": "auto-start-reverse",
    })
    ET.SubElement(marker, f"{{{SVG_NS}}}path", {"d": "M 0 0 L 10 5 L 0 10 z",
                                                 "fill": "context-stroke"})
    axes = ET.SubElement(root, f"{{{SVG_NS}}}g", {"class": "axes", "stroke": "#dddddd"})
    ET.SubElement(axes, f"{{{SVG_NS}}}line", {"x1": "0", "y1": f"{c:g}", "x2": str(size),
                                               "y2": f"{c:g}"})
    ET.SubElement(axes, f"{{{SVG_NS}}}line", {"x1": f"{c:g}", "y1": "0", "x2": f"{c:g}",
                                               "y2": str(size)})

    def vector(parent, state, css, color, length, ident, text=None):
        x, y, complex_part = _xy(state)
        attrs = {
            "class": css, "id": ident,
            "x1": f"{c:g}", "y1": f"{c:g}",
            "x2": f"{c + length * scale * x:.3f}", "y2": f"{c - length * scale * y:.3f}",
            "stroke": color, "stroke-width": "2", "marker-end": "url(#arrow)",
        }
        if complex_part:
            attrs["stroke-dasharray"] = "5,3"
        ET.SubElement(parent, f"{{{SVG_NS}}}line", attrs)
        if text is not None:
            label = ET.SubElement(parent, f"{{{SVG_NS}}}text", {
                "class": "label", "x": f"{c + 1.08 * length * scale * x:.3f}",
                "y": f"{c - 1.08 * length * scale * y:.3f}", "fill": color,
                "font-size": "14", "font-family": "sans-serif",
            })
            label.text = text

    if dist is not None:
        finals = ET.SubElement(root, f"{{{SVG_NS}}}g", {"class": "final-states"})
        for k, state in enumerate(distinct_final_states(dist)):
            vector(finals, state, "final-state", FINAL_COLOR, 0.75, f"final-{k}")
    group = ET.SubElement(root, f"{{{SVG_NS}}}g", {"class": "measurement-states"})
    for k, (label, state) in enumerate(device.states):
        vector(group, state, "measurement-state", colors[k % len(colors)], 1.0,
               f"state-{label}", label)
    vector(root, initial_state, "initial-state", INITIAL_COLOR, 0.9, "initial", "ψ")
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"
