//! Stepped two-row timeline: the trace (T) above, the history (H) below.

use std::fmt::Write as _;

use super::{extract_history, ChronologicalDivision, Trace, TraceError};
use crate::syntax::render_state;

const CELL: usize = 90;
const ROW: usize = 40;
const LEFT: usize = 30;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn label(states: impl Iterator<Item = String>) -> String {
    let v: Vec<String> = states.collect();
    if v.is_empty() {
        "∅".into()
    } else {
        escape(&v.join(", "))
    }
}

pub fn render_timeline(t: &Trace, d: &ChronologicalDivision) -> Result<String, TraceError> {
    let h = extract_history(t, d)?;
    let width = LEFT + CELL * t.len() + 10;
    let height = ROW * 3 + 10;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="5" y="{}">T</text>"#, ROW / 2 + 14);
    let _ = writeln!(s, r#"<text x="5" y="{}">H</text>"#, ROW + ROW / 2 + 24);
    for (i, step) in t.steps.iter().enumerate() {
        let x = LEFT + CELL * i;
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="10" width="{CELL}" height="{ROW}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 4,
            10 + ROW / 2 + 4,
            label(step.iter().map(render_state))
        );
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" fill="#666">{}</text>"##,
            x + CELL / 2 - 4,
            ROW * 3 + 5,
            t.start + i
        );
    }
    let y = 20 + ROW;
    for (k, w) in d.dates().windows(2).enumerate() {
        let x = LEFT + CELL * (w[0] - t.start);
        let span = CELL * (w[1] - w[0]);
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{y}" width="{span}" height="{ROW}" fill="#eef" stroke="#336"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 4,
            y + ROW / 2 + 4,
            label(h.periods[k].iter().map(render_state))
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
