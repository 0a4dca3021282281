"""Minimal standalone SVG emitters for the CLI plots.

Hand-rolled rather than delegated to a plotting library so output bytes are a
pure function of the data: the determinism contract covers plot files too.
Only primitive shapes are used and all coordinates are formatted with a fixed
precision.
"""

from __future__ import annotations

_FONT = 'font-family="sans-serif"'

# plot frame geometry shared by the square plots
_W = 500
_H = 500
_ML, _MR, _MT, _MB = 62, 20, 20, 52
_PW = _W - _ML - _MR
_PH = _H - _MT - _MB


def _f(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


def _sx(v: float) -> float:
    return _ML + v * _PW


def _sy(v: float) -> float:
    return _MT + (1.0 - v) * _PH


def _polyline(points, stroke: str, width: float = 1.5, dash: str = "") -> str:
    coords = " ".join(f"{_f(_sx(x))},{_f(_sy(y))}" for x, y in points)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}"'
            f'{extra} points="{coords}"/>')


def _frame(x_label: str, y_label: str) -> list:
    parts = [
        f'<rect x="{_ML}" y="{_MT}" width="{_PW}" height="{_PH}" '
        'fill="none" stroke="#444" stroke-width="1"/>'
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = _f(_sx(tick))
        y = _f(_sy(tick))
        parts.append(f'<line x1="{x}" y1="{_MT + _PH}" x2="{x}" y2="{_MT + _PH + 5}" '
                     'stroke="#444" stroke-width="1"/>')
        parts.append(f'<text x="{x}" y="{_MT + _PH + 18}" {_FONT} font-size="11" '
                     f'text-anchor="middle">{tick:g}</text>')
        parts.append(f'<line x1="{_ML - 5}" y1="{y}" x2="{_ML}" y2="{y}" '
                     'stroke="#444" stroke-width="1"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y}" {_FONT} font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">{tick:g}</text>')
    parts.append(f'<text x="{_ML + _PW / 2:g}" y="{_H - 12}" {_FONT} font-size="13" '
                 f'text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="16" y="{_MT + _PH / 2:g}" {_FONT} font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 {_MT + _PH / 2:g})">'
                 f'{y_label}</text>')
    return parts


def _document(body: list, width: int = _W, height: int = _H) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>',
                      *body, "</svg>"]) + "\n"


def roc_svg(empirical_curve, model_curve) -> str:
    """Empirical ROC and model-based ROC overlaid with the chance diagonal."""
    body = _frame("False positive rate", "True positive rate")
    body.append(_polyline([(0, 0), (1, 1)], "#999", 1.0, dash="4,4"))
    body.append(_polyline(empirical_curve.points, "#000000", 1.8))
    body.append(_polyline(model_curve.points, "#d62728", 1.8))
    lx = _ML + 14
    for dy, color, label, curve in ((18, "#000000", "empirical ROC", empirical_curve),
                                    (34, "#d62728", "model-based ROC", model_curve)):
        body.append(f'<line x1="{lx}" y1="{_MT + dy - 4}" x2="{lx + 18}" '
                    f'y2="{_MT + dy - 4}" stroke="{color}" stroke-width="1.8"/>')
        body.append(f'<text x="{lx + 24}" y="{_MT + dy}" {_FONT} font-size="12" '
                    f'fill="{color}">{label} (AUC {curve.auc:.3f})</text>')
    return _document(body)


def calibration_svg(bins) -> str:
    """Binned observed event rate against mean predicted risk."""
    body = _frame("Mean predicted risk", "Observed event rate")
    body.append(_polyline([(0, 0), (1, 1)], "#999", 1.0, dash="4,4"))
    for b in bins:
        body.append(f'<circle cx="{_f(_sx(b.mean_risk))}" cy="{_f(_sy(b.event_rate))}" '
                    'r="4" fill="#1f77b4"/>')
    return _document(body)


_BAR_COLORS = (
    ("mean cal.", "#1f77b4"),
    ("ROC eq.", "#ff7f0e"),
    ("unified", "#2ca02c"),
    ("LRT", "#9467bd"),
)

_PANEL_W = 150
_PANEL_H = 120
_PANEL_PAD = 16
_PER_ROW = 5


def power_svg(table) -> str:
    """Grid of per-scenario bar panels, one bar per test, 0.05 line marked."""
    rows = table.rows
    n_rows = (len(rows) + _PER_ROW - 1) // _PER_ROW
    width = _PER_ROW * (_PANEL_W + _PANEL_PAD) + _PANEL_PAD
    height = n_rows * (_PANEL_H + 46) + _PANEL_PAD + 24
    body = []
    for i, row in enumerate(rows):
        x0 = _PANEL_PAD + (i % _PER_ROW) * (_PANEL_W + _PANEL_PAD)
        y0 = _PANEL_PAD + (i // _PER_ROW) * (_PANEL_H + 46)
        body.append(f'<rect x="{x0}" y="{y0}" width="{_PANEL_W}" height="{_PANEL_H}" '
                    'fill="none" stroke="#444" stroke-width="1"/>')
        rates = (row.reject_mean_cal, row.reject_roc_eq, row.reject_unified,
                 row.reject_lrt)
        bar_w = _PANEL_W / 5
        for j, (rate, (_, color)) in enumerate(zip(rates, _BAR_COLORS)):
            if rate is None:
                continue
            h = rate * _PANEL_H
            bx = x0 + bar_w * (j + 0.5)
            body.append(f'<rect x="{_f(bx)}" y="{_f(y0 + _PANEL_H - h)}" '
                        f'width="{_f(bar_w * 0.8)}" height="{_f(h)}" fill="{color}"/>')
        y_alpha = y0 + _PANEL_H * (1.0 - table.alpha)
        body.append(f'<line x1="{x0}" y1="{_f(y_alpha)}" x2="{x0 + _PANEL_W}" '
                    f'y2="{_f(y_alpha)}" stroke="#d62728" stroke-width="1" '
                    'stroke-dasharray="3,3"/>')
        sc = row.scenario
        label = f"{sc.family.value} a={sc.a:g} b={sc.b:g} n={sc.n}"
        if sc.panel:
            label = f"{sc.family.value} panel {sc.panel} n={sc.n}"
        body.append(f'<text x="{x0 + _PANEL_W / 2:g}" y="{y0 + _PANEL_H + 16}" {_FONT} '
                    f'font-size="10" text-anchor="middle">{label}</text>')
    legend_y = height - 10
    lx = _PANEL_PAD
    for name, color in _BAR_COLORS:
        body.append(f'<rect x="{lx}" y="{legend_y - 10}" width="10" height="10" '
                    f'fill="{color}"/>')
        body.append(f'<text x="{lx + 14}" y="{legend_y}" {_FONT} font-size="11">'
                    f'{name}</text>')
        lx += 14 + 8 * len(name) + 18
    return _document(body, width=width, height=height)
