//! Minimal deterministic SVG rendering of planar point sets.
//!
//! One figure is a list of [`Curve`]s drawn as colored polylines over plain
//! axes with a caption. Point sets that arrive unordered (caustic scan
//! output) are chained into polylines by a greedy nearest-neighbor walk,
//! with a break whenever the next hop is long relative to the figure size —
//! separate arcs of one branch then become separate polylines instead of
//! being bridged by a false chord.
//!
//! The output contains no timestamps or other environment-dependent
//! metadata: one input produces one byte sequence, always.

/// One labeled point set of a figure.
#[derive(Clone, Debug)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Points are already consecutive along the curve; skip re-chaining.
    pub ordered: bool,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 720.0;
const MARGIN: f64 = 48.0;
const CAPTION_BAND: f64 = 40.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

/// Render the figure. Curves are colored by index (palette cycles); the
/// caption is printed under the plot area.
pub fn render_svg(curves: &[Curve], caption: &str) -> String {
    let mut body = String::new();
    let total_h = HEIGHT + CAPTION_BAND;
    body.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{total_h}\" \
         viewBox=\"0 0 {WIDTH} {total_h}\">\n"
    ));
    body.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{total_h}\" fill=\"white\"/>\n"
    ));

    let all: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();

    if all.is_empty() {
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"14\">no samples</text>\n",
            WIDTH / 2.0,
            HEIGHT / 2.0
        ));
        push_caption(&mut body, caption);
        body.push_str("</svg>\n");
        return body;
    }

    // Bounding box with 8% padding, degenerate axes widened.
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in &all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    let widen = |lo: &mut f64, hi: &mut f64| {
        let span = *hi - *lo;
        let pad = if span > 0.0 { 0.08 * span } else { 0.5 };
        *lo -= pad;
        *hi += pad;
    };
    widen(&mut x0, &mut x1);
    widen(&mut y0, &mut y1);

    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let diag = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();

    // Frame and interior zero-axes.
    body.push_str(&format!(
        "<rect x=\"{M}\" y=\"{M}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"none\" \
         stroke=\"#999\" stroke-width=\"1\"/>\n",
        M = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    ));
    if x0 < 0.0 && x1 > 0.0 {
        body.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{t}\" x2=\"{x:.2}\" y2=\"{b:.2}\" stroke=\"#ccc\" \
             stroke-width=\"1\"/>\n",
            x = px(0.0),
            t = MARGIN,
            b = HEIGHT - MARGIN
        ));
    }
    if y0 < 0.0 && y1 > 0.0 {
        body.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{y:.2}\" x2=\"{r:.2}\" y2=\"{y:.2}\" stroke=\"#ccc\" \
             stroke-width=\"1\"/>\n",
            l = MARGIN,
            r = WIDTH - MARGIN,
            y = py(0.0)
        ));
    }
    // Corner coordinate labels.
    body.push_str(&format!(
        "<text x=\"{M}\" y=\"{yb:.2}\" font-family=\"monospace\" font-size=\"11\" \
         fill=\"#555\">({x0:.3}, {y0:.3})</text>\n",
        M = MARGIN,
        yb = HEIGHT - MARGIN + 14.0
    ));
    body.push_str(&format!(
        "<text x=\"{xr:.2}\" y=\"{yt}\" text-anchor=\"end\" font-family=\"monospace\" \
         font-size=\"11\" fill=\"#555\">({x1:.3}, {y1:.3})</text>\n",
        xr = WIDTH - MARGIN,
        yt = MARGIN - 6.0
    ));

    for (k, curve) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = curve
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let runs = if curve.ordered {
            vec![pts]
        } else {
            chain(pts, 0.03 * diag)
        };
        for run in runs {
            if run.len() == 1 {
                body.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{color}\"/>\n",
                    px(run[0].0),
                    py(run[0].1)
                ));
                continue;
            }
            let coords: Vec<String> = run
                .iter()
                .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
                .collect();
            body.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\" \
                 points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
        // Legend entry.
        body.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"end\" font-family=\"monospace\" \
             font-size=\"12\" fill=\"{color}\">{}</text>\n",
            escape(&curve.label),
            x = WIDTH - MARGIN - 6.0,
            y = MARGIN + 16.0 + 15.0 * (k as f64),
        ));
    }

    push_caption(&mut body, caption);
    body.push_str("</svg>\n");
    body
}

fn push_caption(body: &mut String, caption: &str) {
    body.push_str(&format!(
        "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"13\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT + 24.0,
        escape(caption)
    ));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Greedy nearest-neighbor chaining of an unordered point set into runs.
/// Starts at the lexicographically smallest point; a hop longer than
/// `break_len` starts a new run.
fn chain(mut pts: Vec<(f64, f64)>, break_len: f64) -> Vec<Vec<(f64, f64)>> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    pts.dedup();
    let mut used = vec![false; pts.len()];
    let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut remaining = pts.len();
    while remaining > 0 {
        // Seed: first unused point in lexicographic order.
        let start = used.iter().position(|u| !u).expect("remaining > 0");
        used[start] = true;
        remaining -= 1;
        let mut run = vec![pts[start]];
        let mut cur = pts[start];
        loop {
            let mut best: Option<(usize, f64)> = None;
            for (i, p) in pts.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let d = (p.0 - cur.0).hypot(p.1 - cur.1);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            match best {
                Some((i, d)) if d <= break_len => {
                    used[i] = true;
                    remaining -= 1;
                    cur = pts[i];
                    run.push(cur);
                }
                _ => break,
            }
        }
        runs.push(run);
    }
    runs
}
