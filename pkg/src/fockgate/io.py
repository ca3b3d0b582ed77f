"""File formats: netlist and physics JSON, deterministic CSV, SVG plots.

Circuits are data: the JSON netlist schema mirrors the Netlist dataclass
(mode declarations, ordered element entries with port wiring, herald
pattern, qubit encoding) so alternative wirings can be supplied without
code changes.  Tables are comma-separated UTF-8 with LF line endings and
a header row; numbers are written with 12 significant digits so equal
configurations produce byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import replace as dc_replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .fock import H, V, Polarization
from .design import (
    CouplerPhysics,
    Geometry,
    NotchAnchor,
    NotchCalibration,
)
from .gate import (
    ElementSpec,
    HeraldTerm,
    Netlist,
    NetlistError,
    PortDecl,
    QubitEncoding,
)

SIG_DIGITS = 12


def format_number(value: float) -> str:
    """Fixed 12-significant-digit rendering used in every table."""
    if value == int(value) and abs(value) < 1e15:
        # keep integers clean but unambiguous
        return f"{value:.1f}" if isinstance(value, float) else str(value)
    return f"{value:.{SIG_DIGITS}g}"


def format_complex(value: complex) -> str:
    return f"{format_number(value.real)}{'+' if value.imag >= 0 else '-'}{format_number(abs(value.imag))}j"


# -- netlist JSON ------------------------------------------------------------


def _pol_from_str(s: str) -> Polarization:
    try:
        return Polarization(s)
    except ValueError:
        raise NetlistError(f"unknown polarization {s!r}; expected 'H' or 'V'") from None


def _params_to_json(params: Mapping[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in params.items():
        if key == "matrix":
            m = np.asarray(value, dtype=complex)
            out[key] = [[[float(c.real), float(c.imag)] for c in row] for row in m]
        else:
            out[key] = value
    return out


def _params_from_json(params: Mapping[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in params.items():
        if key == "matrix":
            out[key] = [
                [complex(c[0], c[1]) for c in row] for row in value
            ]
        else:
            out[key] = value
    return out


def netlist_to_dict(netlist: Netlist) -> dict[str, Any]:
    return {
        "ports": [{"name": p.name, "role": p.role} for p in netlist.ports],
        "elements": [
            {
                "name": el.name,
                "kind": el.kind,
                "ports": list(el.ports),
                "params": _params_to_json(el.param_dict),
            }
            for el in netlist.elements
        ],
        "herald": [
            {
                "ports": list(t.ports),
                "pols": [p.value for p in t.pols],
                "count": t.count,
            }
            for t in netlist.herald
        ],
        "encoding": {
            "target": netlist.encoding.target,
            "control": netlist.encoding.control,
            "program": netlist.encoding.program,
        },
    }


def netlist_from_dict(data: Mapping[str, Any]) -> Netlist:
    try:
        ports = tuple(
            PortDecl(p["name"], p.get("role", "internal")) for p in data["ports"]
        )
        elements = tuple(
            ElementSpec(
                el["name"],
                el["kind"],
                tuple(el["ports"]),
                tuple(sorted(_params_from_json(el.get("params", {})).items())),
            )
            for el in data["elements"]
        )
        herald = tuple(
            HeraldTerm(
                tuple(t["ports"]),
                tuple(_pol_from_str(p) for p in t["pols"]),
                int(t["count"]),
            )
            for t in data["herald"]
        )
        enc = data["encoding"]
        encoding = QubitEncoding(enc["target"], enc["control"], enc["program"])
    except (KeyError, TypeError) as exc:
        raise NetlistError(f"malformed netlist document: {exc}") from exc
    return Netlist(ports, elements, herald, encoding)


def load_netlist(path: str | Path) -> Netlist:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistError(f"netlist file {path} is not valid JSON: {exc}") from exc
    return netlist_from_dict(data)


def save_netlist(netlist: Netlist, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(netlist_to_dict(netlist), indent=2) + "\n", encoding="utf-8"
    )


# -- physics JSON ------------------------------------------------------------


class PhysicsError(ValueError):
    """Raised when a physics configuration fails validation."""


def physics_to_dict(physics: CouplerPhysics) -> dict[str, Any]:
    return {
        "beat_um": {"H": physics.beat_h, "V": physics.beat_v},
        "geometry_nm": {
            "width": physics.geometry.width_nm,
            "height": physics.geometry.height_nm,
            "gap": physics.geometry.gap_nm,
        },
        "wavelength_um": physics.geometry.wavelength_um,
        "ring_radius_um": physics.ring_radius_um,
        "notch_nm": {
            "width": physics.notch_width_nm,
            "height": physics.notch_height_nm,
        },
        "coupler_lengths_um": dict(physics.coupler_lengths),
        "sensitivities_um_per_nm": {
            dim: {"H": vals[0], "V": vals[1]} for dim, vals in physics.sensitivities
        },
        "notch_anchors": [
            {
                "length_um": a.length_um,
                "input_pol": a.input_pol.value,
                "conversion": a.conversion,
            }
            for a in physics.notch.anchors
        ],
    }


def physics_from_dict(data: Mapping[str, Any]) -> CouplerPhysics:
    try:
        beat = data.get("beat_um", {})
        geo = data.get("geometry_nm", {})
        anchors = tuple(
            NotchAnchor(
                float(a["length_um"]),
                _pol_from_str(a["input_pol"]),
                float(a["conversion"]),
            )
            for a in data.get(
                "notch_anchors",
                [
                    {"length_um": 0.75, "input_pol": "V", "conversion": 0.25},
                    {"length_um": 2.90, "input_pol": "H", "conversion": 0.50},
                    {"length_um": 2.75, "input_pol": "V", "conversion": 0.50},
                ],
            )
        )
        sens = data.get("sensitivities_um_per_nm", {})
        sens_tuple = tuple(
            (
                dim,
                (
                    float(sens.get(dim, {}).get("H", 0.0)),
                    float(sens.get(dim, {}).get("V", 0.0)),
                ),
            )
            for dim in ("width", "height", "gap")
        )
        lengths = data.get("coupler_lengths_um")
        physics = CouplerPhysics(
            beat_h=float(beat.get("H", 35.80)),
            beat_v=float(beat.get("V", 8.32)),
            geometry=Geometry(
                width_nm=float(geo.get("width", 350.0)),
                height_nm=float(geo.get("height", 350.0)),
                gap_nm=float(geo.get("gap", 250.0)),
                wavelength_um=float(data.get("wavelength_um", 1.55)),
            ),
            sensitivities=sens_tuple,
            notch=NotchCalibration(anchors),
            ring_radius_um=float(data.get("ring_radius_um", 8.00)),
            notch_width_nm=float(data.get("notch_nm", {}).get("width", 175.0)),
            notch_height_nm=float(data.get("notch_nm", {}).get("height", 175.0)),
        )
        if lengths is not None:
            physics = dc_replace(
                physics,
                coupler_lengths=tuple(
                    sorted((str(k), float(v)) for k, v in lengths.items())
                ),
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PhysicsError):
            raise
        raise PhysicsError(f"malformed physics document: {exc}") from exc
    return physics


def load_physics(path: str | Path) -> CouplerPhysics:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PhysicsError(f"physics file {path} is not valid JSON: {exc}") from exc
    return physics_from_dict(data)


def save_physics(physics: CouplerPhysics, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(physics_to_dict(physics), indent=2) + "\n", encoding="utf-8"
    )


# -- CSV ----------------------------------------------------------------------


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text with LF endings; floats use the fixed 12-digit format."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, complex):
                cells.append(format_complex(cell))
            elif isinstance(cell, float):
                cells.append(format_number(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    Path(path).write_text(render_csv(header, rows), encoding="utf-8", newline="\n")


# -- SVG line plot -------------------------------------------------------------


def write_svg_line_plot(
    path: str | Path,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    title: str,
    xlabel: str,
    ylabel: str,
    width: int = 720,
    height: int = 480,
) -> None:
    """Minimal deterministic SVG line chart (no plotting dependency)."""
    margin = 64
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    xs = list(x)
    all_y = [y for ys in series.values() for y in ys]
    if not xs or not all_y:
        raise ValueError("plot requires at least one point")
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(all_y), max(all_y)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    pad = 0.05 * (y_max - y_min)
    y_min -= pad
    y_max += pad

    def px(v: float) -> float:
        return margin + (v - x_min) / (x_max - x_min) * plot_w

    def py(v: float) -> float:
        return height - margin - (v - y_min) / (y_max - y_min) * plot_h

    colors = ["#1f6fb2", "#c24f1d", "#2d8a4e", "#7b4fa6", "#b2261f"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2:.1f}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
        f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333" stroke-width="1"/>',
        f'<text x="{width/2:.1f}" y="{height-16}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{xlabel}</text>',
        f'<text x="18" y="{height/2:.1f}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 18 {height/2:.1f})">{ylabel}</text>',
    ]
    # axis ticks: five per axis
    for i in range(5):
        xv = x_min + (x_max - x_min) * i / 4
        yv = y_min + (y_max - y_min) * i / 4
        parts.append(
            f'<text x="{px(xv):.1f}" y="{height-margin+18}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{margin-8}" y="{py(yv)+4:.1f}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif">{yv:.4g}</text>'
        )
        parts.append(
            f'<line x1="{margin}" y1="{py(yv):.1f}" x2="{width-margin}" '
            f'y2="{py(yv):.1f}" stroke="#ddd" stroke-width="0.5"/>'
        )
    for k, (name, ys) in enumerate(series.items()):
        color = colors[k % len(colors)]
        points = " ".join(f"{px(xv):.2f},{py(yv):.2f}" for xv, yv in zip(xs, ys))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(
            f'<text x="{width-margin-6}" y="{margin+16+14*k}" text-anchor="end" '
            f'font-size="12" font-family="sans-serif" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")
