//! Static SVG renderers for the dashboard panels: speaker timeline, share
//! pie, volatility bars, turn-taking chord, and distribution box plots.
//!
//! Documents are generated directly — no charting dependency — so every
//! geometric quantity is an affine function of the data. The layout structs
//! and their coordinate mappings are public: tests recompute expected pixel
//! positions from the same inputs and compare against rendered attributes.
//! All canvases are 1000 px wide; coordinates are written with two decimals.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use convo_core::corpus::SegmentTriple;
use convo_core::model::Meeting;
use convo_core::trend::FiveNumberSummary;
use convo_core::turns::ChordData;

/// Fixed palette indexed by participant order, so re-renders of the same
/// meeting always color speakers identically.
pub const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

pub fn palette_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("meeting has no utterances to draw")]
    EmptyMeeting,
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
}

fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open_svg(out: &mut String, width: f64, height: f64) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"13\">",
        px(width),
        px(height),
        px(width),
        px(height)
    );
}

// ---------------------------------------------------------------------------
// Timeline
// ---------------------------------------------------------------------------

/// Timeline canvas layout. One row per speaker, x linear in meeting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineLayout {
    pub width: f64,
    pub margin_left: f64,
    pub margin_right: f64,
    pub margin_top: f64,
    pub margin_bottom: f64,
    pub row_height: f64,
    pub row_gap: f64,
}

impl Default for TimelineLayout {
    fn default() -> Self {
        TimelineLayout {
            width: 1000.0,
            margin_left: 150.0,
            margin_right: 20.0,
            margin_top: 24.0,
            margin_bottom: 30.0,
            row_height: 26.0,
            row_gap: 10.0,
        }
    }
}

impl TimelineLayout {
    pub fn plot_width(&self) -> f64 {
        self.width - self.margin_left - self.margin_right
    }

    pub fn height(&self, n_rows: usize) -> f64 {
        self.margin_top
            + n_rows as f64 * (self.row_height + self.row_gap)
            + self.margin_bottom
    }

    /// Map a time within `span` to an x coordinate. A zero-length span maps
    /// everything to the left edge.
    pub fn x(&self, t_ms: u64, span: (u64, u64)) -> f64 {
        let (a, b) = span;
        if b <= a {
            return self.margin_left;
        }
        self.margin_left + (t_ms - a) as f64 / (b - a) as f64 * self.plot_width()
    }

    pub fn row_top(&self, row: usize) -> f64 {
        self.margin_top + row as f64 * (self.row_height + self.row_gap)
    }
}

/// Render the speaker timeline: one rectangle per utterance, one row per
/// participant.
pub fn render_timeline_svg(meeting: &Meeting) -> Result<String, RenderError> {
    let span = meeting.span_ms().ok_or(RenderError::EmptyMeeting)?;
    let layout = TimelineLayout::default();
    let rows: Vec<&String> = meeting.participants.iter().collect();
    let row_of = |speaker: &str| rows.iter().position(|r| r.as_str() == speaker).unwrap_or(0);

    let mut out = String::with_capacity(2048);
    open_svg(&mut out, layout.width, layout.height(rows.len()));
    for (i, speaker) in rows.iter().enumerate() {
        let y = layout.row_top(i);
        let _ = write!(
            out,
            "<text class=\"rowlabel\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            px(layout.margin_left - 8.0),
            px(y + layout.row_height * 0.7),
            esc(speaker)
        );
        let _ = write!(
            out,
            "<line class=\"rowline\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>",
            px(layout.margin_left),
            px(y + layout.row_height / 2.0),
            px(layout.width - layout.margin_right),
            px(y + layout.row_height / 2.0)
        );
    }
    for u in &meeting.utterances {
        let row = row_of(&u.speaker);
        let x0 = layout.x(u.start_ms, span);
        let x1 = layout.x(u.end_ms, span);
        let _ = write!(
            out,
            "<rect class=\"utt\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{}</title></rect>",
            px(x0),
            px(layout.row_top(row)),
            px(x1 - x0),
            px(layout.row_height),
            palette_color(row),
            esc(&format!("{} {}–{}s", u.speaker, u.start_seconds(), u.end_seconds())),
        );
    }
    // Time extent labels.
    let h = layout.height(rows.len());
    let _ = write!(
        out,
        "<text class=\"axislabel\" x=\"{}\" y=\"{}\">{}s</text><text class=\"axislabel\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}s</text>",
        px(layout.margin_left),
        px(h - 8.0),
        span.0 as f64 / 1000.0,
        px(layout.width - layout.margin_right),
        px(h - 8.0),
        span.1 as f64 / 1000.0,
    );
    out.push_str("</svg>");
    Ok(out)
}

// ---------------------------------------------------------------------------
// Volatility bars
// ---------------------------------------------------------------------------

/// Bar-panel layout for the three volatility slots (whole, first half,
/// second half).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarsLayout {
    pub width: f64,
    pub height: f64,
    pub plot_top: f64,
    pub plot_bottom: f64,
    pub bar_width: f64,
}

impl Default for BarsLayout {
    fn default() -> Self {
        BarsLayout { width: 1000.0, height: 320.0, plot_top: 40.0, plot_bottom: 270.0, bar_width: 140.0 }
    }
}

impl BarsLayout {
    pub fn slot_center(&self, slot: usize) -> f64 {
        self.width * (slot as f64 + 0.5) / 3.0
    }

    pub fn plot_height(&self) -> f64 {
        self.plot_bottom - self.plot_top
    }

    /// Bar height for `value` when the tallest bar shows `max`.
    pub fn bar_height(&self, value: f64, max: f64) -> f64 {
        if max <= 0.0 {
            0.0
        } else {
            value / max * self.plot_height()
        }
    }
}

/// Render whole/first/second volatility bars. Absent segments become labeled
/// empty slots; present values scale against the largest present value.
pub fn render_cv_bars_svg(cv: &SegmentTriple) -> String {
    let layout = BarsLayout::default();
    let slots: [(&str, Option<f64>); 3] = [
        ("whole", cv.whole),
        ("first half", cv.first_half),
        ("second half", cv.second_half),
    ];
    let max = slots.iter().filter_map(|s| s.1).fold(0.0f64, f64::max);

    let mut out = String::with_capacity(1024);
    open_svg(&mut out, layout.width, layout.height);
    let _ = write!(
        out,
        "<line class=\"baseline\" x1=\"0\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\"/>",
        px(layout.plot_bottom),
        px(layout.width),
        px(layout.plot_bottom)
    );
    for (i, (label, value)) in slots.iter().enumerate() {
        let cx = layout.slot_center(i);
        match value {
            Some(v) => {
                let h = layout.bar_height(*v, max);
                let _ = write!(
                    out,
                    "<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#4e79a7\"/>",
                    px(cx - layout.bar_width / 2.0),
                    px(layout.plot_bottom - h),
                    px(layout.bar_width),
                    px(h)
                );
                let _ = write!(
                    out,
                    "<text class=\"value\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{v:.3}</text>",
                    px(cx),
                    px(layout.plot_bottom - h - 8.0)
                );
            }
            None => {
                let _ = write!(
                    out,
                    "<text class=\"slot\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#999\">n/a</text>",
                    px(cx),
                    px((layout.plot_top + layout.plot_bottom) / 2.0)
                );
            }
        }
        let _ = write!(
            out,
            "<text class=\"slotlabel\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            px(cx),
            px(layout.plot_bottom + 24.0),
            label
        );
    }
    out.push_str("</svg>");
    out
}

// ---------------------------------------------------------------------------
// Participation pie
// ---------------------------------------------------------------------------

pub const PIE_CENTER: (f64, f64) = (380.0, 330.0);
pub const PIE_RADIUS: f64 = 250.0;
pub const PIE_SIZE: (f64, f64) = (1000.0, 660.0);

/// Point on the pie circle at `frac` of a full turn, measured clockwise from
/// twelve o'clock.
pub fn pie_point(frac: f64) -> (f64, f64) {
    let angle = frac * 2.0 * PI;
    (PIE_CENTER.0 + PIE_RADIUS * angle.sin(), PIE_CENTER.1 - PIE_RADIUS * angle.cos())
}

/// Render participation shares as a pie. Sector angles are proportional to
/// shares; zero shares are skipped. Fails when shares sum to nothing.
pub fn render_pie_svg(shares: &BTreeMap<String, f64>) -> Result<String, RenderError> {
    let total: f64 = shares.values().sum();
    if !(total > 0.0) {
        return Err(RenderError::DegenerateInput("shares sum to zero"));
    }
    let mut out = String::with_capacity(1024);
    open_svg(&mut out, PIE_SIZE.0, PIE_SIZE.1);

    let nonzero: Vec<(&String, f64)> =
        shares.iter().filter(|(_, v)| **v > 0.0).map(|(k, v)| (k, *v / total)).collect();

    if nonzero.len() == 1 {
        let _ = write!(
            out,
            "<circle class=\"sector\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            px(PIE_CENTER.0),
            px(PIE_CENTER.1),
            px(PIE_RADIUS),
            palette_color(color_index(shares, nonzero[0].0))
        );
    } else {
        let mut acc = 0.0f64;
        for (name, frac) in &nonzero {
            let (x0, y0) = pie_point(acc);
            acc += frac;
            let (x1, y1) = pie_point(acc);
            let large = if *frac > 0.5 { 1 } else { 0 };
            let _ = write!(
                out,
                "<path class=\"sector\" d=\"M {} {} L {} {} A {} {} 0 {} 1 {} {} Z\" fill=\"{}\"><title>{}</title></path>",
                px(PIE_CENTER.0),
                px(PIE_CENTER.1),
                px(x0),
                px(y0),
                px(PIE_RADIUS),
                px(PIE_RADIUS),
                large,
                px(x1),
                px(y1),
                palette_color(color_index(shares, name)),
                esc(&format!("{name}: {:.1}%", frac * 100.0)),
            );
        }
    }

    // Legend on the right.
    for (i, (name, share)) in shares.iter().enumerate() {
        let y = 60.0 + i as f64 * 28.0;
        let _ = write!(
            out,
            "<rect class=\"legendswatch\" x=\"700\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{}\"/><text class=\"legendlabel\" x=\"724\" y=\"{}\">{} ({:.1}%)</text>",
            px(y),
            palette_color(i),
            px(y + 13.0),
            esc(name),
            share / total * 100.0,
        );
    }
    out.push_str("</svg>");
    Ok(out)
}

/// Participant order position — shares maps are keyed in participant order.
fn color_index(shares: &BTreeMap<String, f64>, name: &str) -> usize {
    shares.keys().position(|k| k == name).unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Turn-taking chord
// ---------------------------------------------------------------------------

pub const CHORD_CENTER: (f64, f64) = (500.0, 430.0);
pub const CHORD_RADIUS: f64 = 320.0;
pub const CHORD_SIZE: (f64, f64) = (1000.0, 860.0);

/// Maximum ribbon stroke width (weight 1.0).
pub const CHORD_MAX_RIBBON_PX: f64 = 40.0;

/// Maximum self-loop stroke width (fraction 1.0).
pub const CHORD_MAX_LOOP_PX: f64 = 14.0;

/// Anchor point for speaker `i` of `n`, spaced evenly around the circle
/// starting at twelve o'clock.
pub fn chord_anchor(i: usize, n: usize) -> (f64, f64) {
    let angle = i as f64 / n as f64 * 2.0 * PI;
    (CHORD_CENTER.0 + CHORD_RADIUS * angle.sin(), CHORD_CENTER.1 - CHORD_RADIUS * angle.cos())
}

/// Render the turn-taking chord diagram: speakers on a circle, one quadratic
/// ribbon per directed flow with stroke width proportional to its weight,
/// and a loop mark per speaker whose stroke width is proportional to their
/// self-transition fraction.
pub fn render_chord_svg(chord: &ChordData) -> Result<String, RenderError> {
    if chord.speakers.is_empty() || (chord.ribbons.is_empty() && chord.self_loops.is_empty()) {
        return Err(RenderError::DegenerateInput("no flows to draw"));
    }
    let n = chord.speakers.len();
    let pos = |name: &str| chord.speakers.iter().position(|s| s == name).unwrap_or(0);

    let mut out = String::with_capacity(2048);
    open_svg(&mut out, CHORD_SIZE.0, CHORD_SIZE.1);
    let _ = write!(
        out,
        "<circle class=\"ring\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#eee\" stroke-width=\"2\"/>",
        px(CHORD_CENTER.0),
        px(CHORD_CENTER.1),
        px(CHORD_RADIUS)
    );
    for r in &chord.ribbons {
        let (x0, y0) = chord_anchor(pos(&r.from), n);
        let (x1, y1) = chord_anchor(pos(&r.to), n);
        let _ = write!(
            out,
            "<path class=\"ribbon\" d=\"M {} {} Q {} {} {} {}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" stroke-opacity=\"0.55\"><title>{}</title></path>",
            px(x0),
            px(y0),
            px(CHORD_CENTER.0),
            px(CHORD_CENTER.1),
            px(x1),
            px(y1),
            palette_color(pos(&r.from)),
            px(r.weight * CHORD_MAX_RIBBON_PX),
            esc(&format!("{} → {}: {:.1}%", r.from, r.to, r.weight * 100.0)),
        );
    }
    for l in &chord.self_loops {
        if l.fraction <= 0.0 {
            continue;
        }
        let i = pos(&l.speaker);
        let angle = i as f64 / n as f64 * 2.0 * PI;
        let (cx, cy) = (
            CHORD_CENTER.0 + (CHORD_RADIUS + 26.0) * angle.sin(),
            CHORD_CENTER.1 - (CHORD_RADIUS + 26.0) * angle.cos(),
        );
        let _ = write!(
            out,
            "<circle class=\"selfloop\" cx=\"{}\" cy=\"{}\" r=\"14\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            px(cx),
            px(cy),
            palette_color(i),
            px(l.fraction * CHORD_MAX_LOOP_PX),
        );
    }
    for (i, name) in chord.speakers.iter().enumerate() {
        let angle = i as f64 / n as f64 * 2.0 * PI;
        let (x, y) = (
            CHORD_CENTER.0 + (CHORD_RADIUS + 52.0) * angle.sin(),
            CHORD_CENTER.1 - (CHORD_RADIUS + 52.0) * angle.cos(),
        );
        let anchor = if angle.sin() < -0.1 {
            "end"
        } else if angle.sin() > 0.1 {
            "start"
        } else {
            "middle"
        };
        let _ = write!(
            out,
            "<text class=\"chordlabel\" x=\"{}\" y=\"{}\" text-anchor=\"{}\" fill=\"{}\">{}</text>",
            px(x),
            px(y),
            anchor,
            palette_color(i),
            esc(name)
        );
    }
    out.push_str("</svg>");
    Ok(out)
}

// ---------------------------------------------------------------------------
// Box plots
// ---------------------------------------------------------------------------

/// Layout and scale for a panel of vertical box plots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxplotGeometry {
    pub width: f64,
    pub height: f64,
    pub margin_left: f64,
    pub margin_right: f64,
    pub margin_top: f64,
    pub margin_bottom: f64,
    pub n: usize,
    /// Value domain mapped onto the plot height (low, high).
    pub domain: (f64, f64),
}

impl BoxplotGeometry {
    pub fn plot_width(&self) -> f64 {
        self.width - self.margin_left - self.margin_right
    }

    pub fn plot_height(&self) -> f64 {
        self.height - self.margin_top - self.margin_bottom
    }

    /// Vertical position of a value (larger values higher on screen).
    pub fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.domain;
        self.margin_top + (hi - v) / (hi - lo) * self.plot_height()
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.margin_left + (i as f64 + 0.5) * self.plot_width() / self.n as f64
    }

    pub fn box_width(&self) -> f64 {
        (self.plot_width() / self.n as f64 * 0.5).min(90.0)
    }
}

/// Compute the geometry a set of summaries will be drawn with.
pub fn boxplot_geometry(summaries: &[(String, FiveNumberSummary)]) -> Result<BoxplotGeometry, RenderError> {
    if summaries.is_empty() {
        return Err(RenderError::DegenerateInput("no summaries to draw"));
    }
    let lo = summaries.iter().map(|s| s.1.min).fold(f64::INFINITY, f64::min);
    let hi = summaries.iter().map(|s| s.1.max).fold(f64::NEG_INFINITY, f64::max);
    // A flat distribution still needs a non-empty domain to land mid-plot.
    let domain = if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
    Ok(BoxplotGeometry {
        width: 1000.0,
        height: 420.0,
        margin_left: 70.0,
        margin_right: 30.0,
        margin_top: 30.0,
        margin_bottom: 60.0,
        n: summaries.len(),
        domain,
    })
}

/// Render labeled vertical box plots from five-number summaries: whiskers at
/// min and max, box from q1 to q3, line at the median.
pub fn render_boxplot_svg(summaries: &[(String, FiveNumberSummary)]) -> Result<String, RenderError> {
    let g = boxplot_geometry(summaries)?;
    let mut out = String::with_capacity(2048);
    open_svg(&mut out, g.width, g.height);

    // Domain guides.
    for (v, label) in [(g.domain.0, "min"), (g.domain.1, "max")] {
        let _ = write!(
            out,
            "<line class=\"guide\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#eee\"/><text class=\"guidelabel\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.2}</text>",
            px(g.margin_left),
            px(g.y(v)),
            px(g.width - g.margin_right),
            px(g.y(v)),
            px(g.margin_left - 6.0),
            px(g.y(v) + 4.0),
            v
        );
        let _ = label;
    }

    for (i, (label, s)) in summaries.iter().enumerate() {
        let cx = g.x_center(i);
        let bw = g.box_width();
        let color = palette_color(i);
        // Whisker spine.
        let _ = write!(
            out,
            "<line class=\"whisker\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>",
            px(cx),
            px(g.y(s.max)),
            px(cx),
            px(g.y(s.min)),
            color
        );
        // Caps.
        for v in [s.min, s.max] {
            let _ = write!(
                out,
                "<line class=\"cap\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>",
                px(cx - bw / 4.0),
                px(g.y(v)),
                px(cx + bw / 4.0),
                px(g.y(v)),
                color
            );
        }
        // Interquartile box.
        let _ = write!(
            out,
            "<rect class=\"box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"{}\"/>",
            px(cx - bw / 2.0),
            px(g.y(s.q3)),
            px(bw),
            px(g.y(s.q1) - g.y(s.q3)),
            color,
            color
        );
        // Median line.
        let _ = write!(
            out,
            "<line class=\"median\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>",
            px(cx - bw / 2.0),
            px(g.y(s.median)),
            px(cx + bw / 2.0),
            px(g.y(s.median)),
            color
        );
        let _ = write!(
            out,
            "<text class=\"boxlabel\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            px(cx),
            px(g.height - g.margin_bottom + 24.0),
            esc(label)
        );
    }
    out.push_str("</svg>");
    Ok(out)
}
