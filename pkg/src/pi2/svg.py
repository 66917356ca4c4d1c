"""Minimal self-contained SVG output: polylines for profiles, a cell map for sign plots."""

import numpy as np

_W, _H, _PAD = 640, 400, 48
_COLORS = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555")


def _fmt(v):
    return f"{v:.6g}"


def _frame(title, xlabel, ylabel, xlim, ylim):
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
           'fill="none" stroke="black"/>',
           f'<text x="{_W / 2}" y="{_PAD / 2}" text-anchor="middle" font-size="14">{title}</text>',
           f'<text x="{_W / 2}" y="{_H - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
           f'<text x="12" y="{_H / 2}" font-size="12" transform="rotate(-90 12 {_H / 2})" '
           f'text-anchor="middle">{ylabel}</text>']
    for v, anchor, x, y in ((xlim[0], "start", _PAD, _H - _PAD + 16),
                            (xlim[1], "end", _W - _PAD, _H - _PAD + 16)):
        out.append(f'<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="10">{_fmt(v)}</text>')
    for v, y in ((ylim[0], _H - _PAD), (ylim[1], _PAD + 10)):
        out.append(f'<text x="{_PAD - 4}" y="{y}" text-anchor="end" font-size="10">{_fmt(v)}</text>')
    return out


def _limits(vals):
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    return lo, hi


def polyline_svg(series, title="", xlabel="x", ylabel="y"):
    """``series`` maps a label to (xs, ys); non-finite points are dropped."""
    clean = {}
    for label, (xs, ys) in series.items():
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        ok = np.isfinite(xs) & np.isfinite(ys)
        if ok.any():
            clean[label] = (xs[ok], ys[ok])
    if not clean:
        return "\n".join(_frame(title, xlabel, ylabel, (0, 1), (0, 1)) + ["</svg>"]) + "\n"
    xlim = _limits(np.concatenate([v[0] for v in clean.values()]))
    ylim = _limits(np.concatenate([v[1] for v in clean.values()]))
    out = _frame(title, xlabel, ylabel, xlim, ylim)

    def px(x):
        return _PAD + (x - xlim[0]) / (xlim[1] - xlim[0]) * (_W - 2 * _PAD)

    def py(y):
        return _H - _PAD - (y - ylim[0]) / (ylim[1] - ylim[0]) * (_H - 2 * _PAD)

    for i, (label, (xs, ys)) in enumerate(clean.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{_W - _PAD - 4}" y="{_PAD + 14 * (i + 1)}" text-anchor="end" '
                   f'font-size="11" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sign_map_svg(re_values, im_values, values, title="", marks=()):
    """Cells shaded where ``values > 0`` (rows of ``values`` follow ``im_values``)."""
    re_values = np.asarray(re_values, float)
    im_values = np.asarray(im_values, float)
    values = np.asarray(values, float)
    xlim = (re_values[0], re_values[-1])
    ylim = (im_values[0], im_values[-1])
    out = _frame(title, "Re zeta", "Im zeta", xlim, ylim)
    nx, ny = len(re_values), len(im_values)
    cw = (_W - 2 * _PAD) / nx
    ch = (_H - 2 * _PAD) / ny
    for j in range(ny):
        for i in range(nx):
            if values[j, i] > 0:
                x = _PAD + i * cw
                y = _H - _PAD - (j + 1) * ch
                out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                           'fill="#bbbbbb"/>')
    for z in marks:
        x = _PAD + (z.real - xlim[0]) / (xlim[1] - xlim[0]) * (_W - 2 * _PAD)
        y = _H - _PAD - (z.imag - ylim[0]) / (ylim[1] - ylim[0]) * (_H - 2 * _PAD)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
