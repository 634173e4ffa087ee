//! Boxes-and-glue layout of description trees.
//!
//! Every element is laid out relative to its own top-left corner and then
//! shifted into place by its parent. Text is measured with a fixed monospace
//! metric so that layout is deterministic.

use crate::desc::{DescItem, DescNode};
use crate::registry::TagRegistry;

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub char_width: f64,
    pub line_height: f64,
    pub font_size: f64,
    /// Horizontal gap between tree daughters.
    pub h_gap: f64,
    /// Vertical gap between a tree mother and its daughters.
    pub v_gap: f64,
    /// Gap between hbox/vbox children and between stacked DRS conditions.
    pub box_gap: f64,
    pub padding: f64,
    pub margin: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            char_width: 7.0,
            line_height: 14.0,
            font_size: 12.0,
            h_gap: 16.0,
            v_gap: 24.0,
            box_gap: 6.0,
            padding: 4.0,
            margin: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxKind {
    Text,
    Line,
    Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Text(String),
    Line { x1: f64, y1: f64, x2: f64, y2: f64 },
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutBox {
    pub kind: BoxKind,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub payload: Payload,
    /// Argument-index path to the originating element.
    pub source: Vec<usize>,
    /// Action of the innermost enclosing `active` element.
    pub action: Option<String>,
}

impl LayoutBox {
    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    fn shift(&mut self, dx: f64, dy: f64) {
        self.x += dx;
        self.y += dy;
        if let Payload::Line { x1, y1, x2, y2 } = &mut self.payload {
            *x1 += dx;
            *x2 += dx;
            *y1 += dy;
            *y2 += dy;
        }
    }
}

/// A laid-out element, positioned at its own origin.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Laid {
    pub width: f64,
    pub height: f64,
    /// Horizontal attachment point for tree branches.
    pub anchor_x: f64,
    pub boxes: Vec<LayoutBox>,
}

impl Laid {
    pub fn shift(&mut self, dx: f64, dy: f64) {
        for b in &mut self.boxes {
            b.shift(dx, dy);
        }
    }

    fn absorb(&mut self, mut other: Laid, dx: f64, dy: f64) {
        other.shift(dx, dy);
        self.boxes.append(&mut other.boxes);
    }
}

pub struct LayoutCx<'a> {
    style: &'a Style,
    registry: &'a TagRegistry,
}

impl<'a> LayoutCx<'a> {
    pub fn style(&self) -> &Style {
        self.style
    }

    pub fn text(&self, s: &str, path: &[usize]) -> Laid {
        let lines: Vec<&str> = s.split('\n').collect();
        let cols = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let width = cols as f64 * self.style.char_width;
        let height = lines.len() as f64 * self.style.line_height;
        Laid {
            width,
            height,
            anchor_x: width / 2.0,
            boxes: vec![LayoutBox {
                kind: BoxKind::Text,
                x: 0.0,
                y: 0.0,
                width,
                height,
                payload: Payload::Text(s.to_string()),
                source: path.to_vec(),
                action: None,
            }],
        }
    }

    pub fn item(&mut self, item: &DescItem, path: &[usize]) -> Laid {
        match item {
            DescItem::Node(n) => self.node(n, path),
            DescItem::Text(s) => self.text(s, path),
        }
    }

    fn args(&mut self, node: &DescNode, path: &[usize], skip: usize) -> Vec<Laid> {
        node.args
            .iter()
            .enumerate()
            .skip(skip)
            .map(|(i, a)| self.item(a, &child_path(path, i)))
            .collect()
    }

    pub fn rect(&self, width: f64, height: f64, path: &[usize]) -> LayoutBox {
        LayoutBox {
            kind: BoxKind::Rect,
            x: 0.0,
            y: 0.0,
            width,
            height,
            payload: Payload::None,
            source: path.to_vec(),
            action: None,
        }
    }

    pub fn line(&self, x1: f64, y1: f64, x2: f64, y2: f64, path: &[usize]) -> LayoutBox {
        LayoutBox {
            kind: BoxKind::Line,
            x: x1.min(x2),
            y: y1.min(y2),
            width: (x2 - x1).abs(),
            height: (y2 - y1).abs(),
            payload: Payload::Line { x1, y1, x2, y2 },
            source: path.to_vec(),
            action: None,
        }
    }

    pub fn node(&mut self, node: &DescNode, path: &[usize]) -> Laid {
        match node.tag.as_str() {
            "plain-text" => match node.args.first() {
                Some(DescItem::Text(s)) => self.text(s, path),
                _ => Laid::default(),
            },
            "tree" => self.tree(node, path),
            "drs" => self.drs(node, path),
            "avm" => self.avm(node, path),
            "hbox" => {
                let parts = self.args(node, path, 0);
                self.hbox(parts)
            }
            "vbox" => {
                let parts = self.args(node, path, 0);
                self.vbox(parts)
            }
            "frame" => {
                let inner = self.item(&node.args[0], &child_path(path, 0));
                self.framed(inner, path)
            }
            "active" => {
                let action = node.action().unwrap_or_default().to_string();
                let mut inner = node
                    .args
                    .get(1)
                    .map(|a| self.item(a, &child_path(path, 1)))
                    .unwrap_or_default();
                for b in &mut inner.boxes {
                    if b.action.is_none() {
                        b.action = Some(action.clone());
                    }
                }
                inner
            }
            tag => match self.registry.plugin(tag).cloned() {
                Some(p) => p.layout(node, self, path),
                None => Laid::default(),
            },
        }
    }

    fn tree(&mut self, node: &DescNode, path: &[usize]) -> Laid {
        let mother = self.item(&node.args[0], &child_path(path, 0));
        let daughters = self.args(node, path, 1);
        if daughters.is_empty() {
            return mother;
        }
        let gap = self.style.h_gap;
        let row_width: f64 = daughters.iter().map(|d| d.width).sum::<f64>() + gap * (daughters.len() - 1) as f64;
        let width = row_width.max(mother.width);
        let row_x = (width - row_width) / 2.0;
        let mother_x = row_x + row_width / 2.0 - mother.width / 2.0;
        let row_y = mother.height + self.style.v_gap;

        let mut out = Laid {
            width,
            height: row_y + daughters.iter().map(|d| d.height).fold(0.0, f64::max),
            anchor_x: mother_x + mother.anchor_x,
            boxes: Vec::new(),
        };
        let top = (out.anchor_x, mother.height);
        out.absorb(mother, mother_x, 0.0);
        let mut x = row_x;
        for (i, d) in daughters.into_iter().enumerate() {
            let line = self.line(top.0, top.1, x + d.anchor_x, row_y, &child_path(path, i + 1));
            out.boxes.push(line);
            let w = d.width;
            out.absorb(d, x, 0.0 + row_y);
            x += w + gap;
        }
        out
    }

    fn drs(&mut self, node: &DescNode, path: &[usize]) -> Laid {
        let p = self.style.padding;
        let universe = self.item(&node.args[0], &child_path(path, 0));
        let conditions = self.args(node, path, 1);
        let inner_width = conditions.iter().map(|c| c.width).fold(universe.width, f64::max);
        let width = inner_width + 2.0 * p;
        let universe_height = universe.height.max(self.style.line_height);
        let sep_y = p + universe_height + p;
        let mut y = sep_y + p;
        let mut placed = Vec::new();
        for (i, c) in conditions.into_iter().enumerate() {
            if i > 0 {
                y += self.style.box_gap;
            }
            let h = c.height;
            placed.push((c, y));
            y += h;
        }
        let height = if placed.is_empty() {
            sep_y + self.style.line_height
        } else {
            y + p
        };
        let mut out = Laid {
            width,
            height,
            anchor_x: width / 2.0,
            boxes: vec![self.rect(width, height, path)],
        };
        out.boxes.push(self.line(0.0, sep_y, width, sep_y, path));
        out.absorb(universe, p, p);
        for (c, y) in placed {
            out.absorb(c, p, y);
        }
        out
    }

    fn avm(&mut self, node: &DescNode, path: &[usize]) -> Laid {
        let p = self.style.padding;
        let items = self.args(node, path, 0);
        let mut rows = Vec::new();
        let mut it = items.into_iter();
        while let (Some(f), Some(v)) = (it.next(), it.next()) {
            rows.push((f, v));
        }
        let feature_width = rows.iter().map(|(f, _)| f.width).fold(0.0, f64::max);
        let value_x = p + feature_width + self.style.h_gap / 2.0;
        let width = rows.iter().map(|(_, v)| value_x + v.width + p).fold(2.0 * p, f64::max);
        let mut out = Laid {
            width,
            height: 0.0,
            anchor_x: width / 2.0,
            boxes: Vec::new(),
        };
        let mut y = p;
        let n = rows.len();
        for (i, (f, v)) in rows.into_iter().enumerate() {
            let h = f.height.max(v.height);
            out.absorb(f, p, y);
            out.absorb(v, value_x, y);
            y += h;
            if i + 1 < n {
                y += self.style.box_gap;
            }
        }
        out.height = (y + p).max(self.style.line_height);
        out.boxes.insert(0, self.rect(width, out.height, path));
        out
    }

    fn hbox(&self, parts: Vec<Laid>) -> Laid {
        let gap = self.style.box_gap;
        let mut out = Laid::default();
        let mut x = 0.0;
        for (i, part) in parts.into_iter().enumerate() {
            if i > 0 {
                x += gap;
            }
            let w = part.width;
            out.height = out.height.max(part.height);
            out.absorb(part, x, 0.0);
            x += w;
        }
        out.width = x;
        out.anchor_x = x / 2.0;
        out
    }

    fn vbox(&self, parts: Vec<Laid>) -> Laid {
        let gap = self.style.box_gap;
        let mut out = Laid::default();
        let mut y = 0.0;
        for (i, part) in parts.into_iter().enumerate() {
            if i > 0 {
                y += gap;
            }
            let h = part.height;
            out.width = out.width.max(part.width);
            out.absorb(part, 0.0, y);
            y += h;
        }
        out.height = y;
        out.anchor_x = out.width / 2.0;
        out
    }

    fn framed(&self, inner: Laid, path: &[usize]) -> Laid {
        let p = self.style.padding;
        let width = inner.width + 2.0 * p;
        let height = inner.height + 2.0 * p;
        let mut out = Laid {
            width,
            height,
            anchor_x: inner.anchor_x + p,
            boxes: vec![self.rect(width, height, path)],
        };
        out.absorb(inner, p, p);
        out
    }
}

fn child_path(path: &[usize], i: usize) -> Vec<usize> {
    let mut p = path.to_vec();
    p.push(i);
    p
}

/// Lays out a description with the built-in tags.
pub fn layout(d: &DescNode, style: &Style) -> Vec<LayoutBox> {
    layout_with(d, style, &TagRegistry::default()).boxes
}

/// Lays out a description, consulting plugins for non-built-in tags.
pub fn layout_with(d: &DescNode, style: &Style, registry: &TagRegistry) -> Laid {
    let mut cx = LayoutCx { style, registry };
    cx.node(d, &[])
}

/// Smallest rectangle containing all boxes, as (x, y, right, bottom).
pub fn bounds(boxes: &[LayoutBox]) -> Option<(f64, f64, f64, f64)> {
    boxes.iter().fold(None, |acc, b| {
        let (x0, y0, x1, y1) = acc.unwrap_or((b.x, b.y, b.right(), b.bottom()));
        Some((x0.min(b.x), y0.min(b.y), x1.max(b.right()), y1.max(b.bottom())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desc::parse_desc;

    fn boxes_under<'a>(boxes: &'a [LayoutBox], prefix: &[usize]) -> Vec<&'a LayoutBox> {
        boxes.iter().filter(|b| b.source.starts_with(prefix)).collect()
    }

    #[test]
    fn tree_mother_is_centered_over_daughters() {
        let d = parse_desc(r#"{tree {plain-text "S"} {plain-text "NP"} {plain-text "VP"}}"#).unwrap();
        let boxes = layout(&d, &Style::default());
        let mother = boxes.iter().find(|b| b.source == [0]).unwrap();
        let (x0, _, x1, _) = bounds(
            &boxes
                .iter()
                .filter(|b| b.source == [1] || b.source == [2])
                .filter(|b| b.kind == BoxKind::Text)
                .cloned()
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mother_center = mother.x + mother.width / 2.0;
        assert!((mother_center - (x0 + x1) / 2.0).abs() <= 0.5);
        assert_eq!(boxes.iter().filter(|b| b.kind == BoxKind::Line).count(), 2);
    }

    #[test]
    fn wide_mother_centers_daughters() {
        let d = parse_desc(r#"{tree {plain-text "a long mother label"} {plain-text "x"}}"#).unwrap();
        let boxes = layout(&d, &Style::default());
        let mother = boxes.iter().find(|b| b.source == [0]).unwrap();
        let daughter = boxes
            .iter()
            .find(|b| b.source == [1] && b.kind == BoxKind::Text)
            .unwrap();
        assert_eq!(mother.x, 0.0);
        let mc = mother.x + mother.width / 2.0;
        let dc = daughter.x + daughter.width / 2.0;
        assert!((mc - dc).abs() <= 0.5);
    }

    #[test]
    fn vbox_stacks_with_gap() {
        let style = Style::default();
        let d = parse_desc(r#"{vbox {plain-text "A"} {plain-text "B"}}"#).unwrap();
        let boxes = layout(&d, &style);
        let a = &boxes[0];
        let b = &boxes[1];
        assert_eq!(b.y, a.bottom() + style.box_gap);
    }

    #[test]
    fn drs_box_counts() {
        let d = parse_desc(r#"{drs {plain-text "x"} {plain-text "man(x)"}}"#).unwrap();
        let boxes = layout(&d, &Style::default());
        let count = |k| boxes.iter().filter(|b| b.kind == k).count();
        assert_eq!(
            (count(BoxKind::Rect), count(BoxKind::Line), count(BoxKind::Text)),
            (1, 1, 2)
        );
    }

    #[test]
    fn drs_contains_its_conditions() {
        let d = parse_desc(
            r#"{drs {plain-text "x y"} {plain-text "farmer(x)"} {drs {plain-text ""} {plain-text "beats(x,y)"}}}"#,
        )
        .unwrap();
        let boxes = layout(&d, &Style::default());
        let outer = &boxes[0];
        for b in &boxes[1..] {
            assert!(b.x >= outer.x && b.right() <= outer.right());
            assert!(b.y >= outer.y && b.bottom() <= outer.bottom());
        }
    }

    #[test]
    fn active_marks_descendants() {
        let d = parse_desc(r#"{hbox {active "go" {frame {plain-text "x"}}} {plain-text "y"}}"#).unwrap();
        let boxes = layout(&d, &Style::default());
        let marked: Vec<_> = boxes.iter().filter(|b| b.action.as_deref() == Some("go")).collect();
        assert_eq!(marked.len(), 2);
        assert!(boxes_under(&boxes, &[1]).iter().all(|b| b.action.is_none()));
    }

    #[test]
    fn avm_rows() {
        let d =
            parse_desc(r#"{avm {plain-text "num"} {plain-text "sg"} {plain-text "per"} {plain-text "3"}}"#).unwrap();
        let boxes = layout(&d, &Style::default());
        assert_eq!(boxes[0].kind, BoxKind::Rect);
        assert_eq!(boxes.len(), 5);
        assert!(boxes[3].y > boxes[1].y);
    }
}
