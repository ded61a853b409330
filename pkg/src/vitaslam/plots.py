"""Hand-rolled SVG rendering of an experience map over the true trajectory."""
from __future__ import annotations

from xml.sax.saxutils import escape

SIZE = 480
MARGIN = 40


def _bounds(points):
    if not points:
        return 0.0, 0.0, 1.0, 1.0
    xs, ys = [p[0] for p in points], [p[1] for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-6)
    return x0, y0, span, span


def map_svg(report, title: str | None = None) -> str:
    emap = report.map
    poses = [e.map_pose for e in emap.experiences]
    truth = [r.truth for r in report.trace]
    x0, y0, span, _ = _bounds([(p.x, p.y) for p in poses + truth])
    scale = (SIZE - 2 * MARGIN) / span

    def px(x, y):
        return MARGIN + (x - x0) * scale, SIZE - MARGIN - (y - y0) * scale

    title = title or f"experience map ({report.mode}, seed {report.seed})"
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<title>{escape(title)}</title>',
           f'<rect class="axes" x="{MARGIN}" y="{MARGIN}" width="{SIZE - 2 * MARGIN}" '
           f'height="{SIZE - 2 * MARGIN}" fill="none" stroke="#888"/>']
    if truth:
        pts = " ".join("%.2f,%.2f" % px(p.x, p.y) for p in truth)
        out.append(f'<polyline class="truth" points="{pts}" fill="none" '
                   f'stroke="#bbb" stroke-width="1"/>')
    closure_links = {(e.current_exp, e.matched_exp, e.cycle) for e in report.loop_closure_events}
    for link in emap.links:
        (ax, ay), (bx, by) = px(poses[link.source].x, poses[link.source].y), \
            px(poses[link.target].x, poses[link.target].y)
        cls = "link closure" if (link.source, link.target, link.cycle) in closure_links else "link"
        colour = "#d33" if cls != "link" else "#36c"
        out.append(f'<line class="{cls}" x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" '
                   f'y2="{by:.2f}" stroke="{colour}" stroke-width="1"/>')
    for e in emap.experiences:
        cx, cy = px(e.map_pose.x, e.map_pose.y)
        out.append(f'<circle class="experience" cx="{cx:.2f}" cy="{cy:.2f}" r="2.5" '
                   f'fill="#036"/>')
    for ev in report.loop_closure_events:
        p = poses[ev.matched_exp]
        cx, cy = px(p.x, p.y)
        out.append(f'<circle class="loop-closure" cx="{cx:.2f}" cy="{cy:.2f}" r="6" '
                   f'fill="none" stroke="#d33" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
