//! SVG and plain-text renderings of laid-out boxes.

use std::fmt::Write;

use crate::layout::{bounds, BoxKind, LayoutBox, Payload, Style};

/// Formats a coordinate without trailing zeros, so output is byte-stable.
fn num(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        let s = format!("{r:.2}");
        s.trim_end_matches('0').to_string()
    }
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn path_attr(path: &[usize]) -> String {
    path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

/// Renders boxes as an SVG document, one element per box.
pub fn render_svg(boxes: &[LayoutBox], style: &Style) -> String {
    let m = style.margin;
    let (w, h) = match bounds(boxes) {
        Some((_, _, x1, y1)) => (x1 + 2.0 * m, y1 + 2.0 * m),
        None => (2.0 * m, 2.0 * m),
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        num(w),
        num(h),
        num(w),
        num(h)
    );
    for b in boxes {
        let mut attrs = format!(" data-path=\"{}\"", path_attr(&b.source));
        if let Some(a) = &b.action {
            let _ = write!(attrs, " data-action=\"{}\"", escape_xml(a));
        }
        match (&b.kind, &b.payload) {
            (BoxKind::Text, Payload::Text(s)) => {
                let _ = write!(
                    out,
                    "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{}\"{attrs}>",
                    num(b.x + m),
                    num(b.y + m),
                    num(style.font_size)
                );
                for (i, line) in s.split('\n').enumerate() {
                    let _ = write!(
                        out,
                        "<tspan x=\"{}\" y=\"{}\">{}</tspan>",
                        num(b.x + m),
                        num(b.y + m + style.line_height * (i as f64 + 0.8)),
                        escape_xml(line)
                    );
                }
                out.push_str("</text>\n");
            }
            (BoxKind::Line, Payload::Line { x1, y1, x2, y2 }) => {
                let _ = writeln!(
                    out,
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"{attrs}/>",
                    num(x1 + m),
                    num(y1 + m),
                    num(x2 + m),
                    num(y2 + m)
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"{attrs}/>",
                    num(b.x + m),
                    num(b.y + m),
                    num(b.width),
                    num(b.height)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Renders an approximation of the layout on a character grid.
pub fn render_ascii(boxes: &[LayoutBox], style: &Style) -> String {
    let Some((_, _, x1, y1)) = bounds(boxes) else {
        return String::new();
    };
    let col = |x: f64| (x / style.char_width).round() as usize;
    let row = |y: f64| (y / style.line_height).round() as usize;
    let cols = col(x1) + 1;
    let rows = row(y1) + 1;
    let mut grid = vec![vec![' '; cols]; rows];
    let put = |grid: &mut Vec<Vec<char>>, r: usize, c: usize, ch: char| {
        if r < grid.len() && c < grid[r].len() {
            grid[r][c] = ch;
        }
    };
    // Rects and lines first so that text wins where they overlap.
    for b in boxes {
        match (&b.kind, &b.payload) {
            (BoxKind::Rect, _) => {
                let (c0, c1, r0, r1) = (col(b.x), col(b.right()), row(b.y), row(b.bottom()));
                for c in c0..=c1 {
                    put(&mut grid, r0, c, '-');
                    put(&mut grid, r1, c, '-');
                }
                for r in r0..=r1 {
                    put(&mut grid, r, c0, '|');
                    put(&mut grid, r, c1, '|');
                }
                for (r, c) in [(r0, c0), (r0, c1), (r1, c0), (r1, c1)] {
                    put(&mut grid, r, c, '+');
                }
            }
            (BoxKind::Line, Payload::Line { x1, y1, x2, y2 }) => {
                let (r0, r1) = (row(*y1), row(*y2));
                if r0 == r1 {
                    let (a, b) = (col(x1.min(*x2)), col(x1.max(*x2)));
                    for c in a..=b {
                        put(&mut grid, r0, c, '-');
                    }
                } else {
                    // Branches are drawn on the rows strictly between their endpoints.
                    let (top, bottom) = if r0 < r1 { (r0, r1) } else { (r1, r0) };
                    let span = (bottom - top) as f64;
                    for r in top + 1..bottom.max(top + 2) {
                        let t = (r - top) as f64 / span;
                        let x = x1 + (x2 - x1) * t;
                        let ch = if (x2 - x1).abs() < style.char_width {
                            '|'
                        } else if x2 > x1 {
                            '\\'
                        } else {
                            '/'
                        };
                        put(&mut grid, r, col(x), ch);
                    }
                }
            }
            _ => {}
        }
    }
    for b in boxes {
        if let Payload::Text(s) = &b.payload {
            for (i, line) in s.split('\n').enumerate() {
                for (j, ch) in line.chars().enumerate() {
                    put(&mut grid, row(b.y) + i, col(b.x) + j, ch);
                }
            }
        }
    }
    let mut out = String::new();
    for line in grid {
        let s: String = line.into_iter().collect();
        out.push_str(s.trim_end());
        out.push('\n');
    }
    let trimmed = out.trim_end_matches('\n').len();
    out.truncate(trimmed);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(num(3.0), "3");
        assert_eq!(num(3.5), "3.5");
        assert_eq!(num(1.0 / 3.0), "0.33");
        assert_eq!(num(-0.0), "0");
    }

    #[test]
    fn empty_document() {
        let svg = render_svg(&[], &Style::default());
        assert!(svg.contains("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<text"));
    }

    #[test]
    fn text_is_escaped() {
        assert_eq!(escape_xml("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
