//! Description strings: a plain-text hierarchical drawing description with no
//! positioning information.
//!
//! ```text
//! element := '{' tag item* '}'
//! item    := element | quoted-string
//! ```
//!
//! Strings are double-quoted; inside them `\"` and `\\` are the only escapes.
//! Any other character, including a literal newline, stands for itself.

use std::fmt;

use thiserror::Error;

use crate::registry::TagRegistry;

/// One element of a description string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescNode {
    pub tag: String,
    pub args: Vec<DescItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DescItem {
    Node(DescNode),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescError {
    #[error("syntax error at {line}:{column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
}

impl DescNode {
    pub fn new(tag: impl Into<String>, args: Vec<DescItem>) -> Self {
        DescNode { tag: tag.into(), args }
    }

    pub fn text(s: impl Into<String>) -> Self {
        DescNode::new("plain-text", vec![DescItem::Text(s.into())])
    }

    pub fn tree(mother: DescNode, daughters: Vec<DescNode>) -> Self {
        let mut args = vec![DescItem::Node(mother)];
        args.extend(daughters.into_iter().map(DescItem::Node));
        DescNode::new("tree", args)
    }

    pub fn hbox(children: Vec<DescNode>) -> Self {
        DescNode::new("hbox", children.into_iter().map(DescItem::Node).collect())
    }

    pub fn vbox(children: Vec<DescNode>) -> Self {
        DescNode::new("vbox", children.into_iter().map(DescItem::Node).collect())
    }

    pub fn frame(child: DescNode) -> Self {
        DescNode::new("frame", vec![DescItem::Node(child)])
    }

    pub fn active(action: impl Into<String>, child: DescNode) -> Self {
        DescNode::new("active", vec![DescItem::Text(action.into()), DescItem::Node(child)])
    }

    /// Element children, skipping string literals.
    pub fn children(&self) -> impl Iterator<Item = &DescNode> {
        self.args.iter().filter_map(|a| match a {
            DescItem::Node(n) => Some(n),
            DescItem::Text(_) => None,
        })
    }

    /// The action identifier of an `active` element.
    pub fn action(&self) -> Option<&str> {
        if self.tag != "active" {
            return None;
        }
        match self.args.first() {
            Some(DescItem::Text(s)) => Some(s),
            _ => None,
        }
    }

    /// Follows a path of argument indices from this node.
    pub fn at_path(&self, path: &[usize]) -> Option<&DescItem> {
        let (first, rest) = path.split_first()?;
        let item = self.args.get(*first)?;
        if rest.is_empty() {
            return Some(item);
        }
        match item {
            DescItem::Node(n) => n.at_path(rest),
            DescItem::Text(_) => None,
        }
    }
}

impl fmt::Display for DescNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}", self.tag)?;
        for a in &self.args {
            f.write_str(" ")?;
            match a {
                DescItem::Node(n) => write!(f, "{n}")?,
                DescItem::Text(s) => f.write_str(&quote(s))?,
            }
        }
        f.write_str("}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Prints a description string on one line.
pub fn print_desc(d: &DescNode) -> String {
    d.to_string()
}

/// Prints with one element per line, daughters indented.
pub fn print_desc_pretty(d: &DescNode) -> String {
    fn go(d: &DescNode, depth: usize, out: &mut String) {
        let simple = d.args.iter().all(|a| matches!(a, DescItem::Text(_)));
        if simple {
            out.push_str(&d.to_string());
            return;
        }
        out.push('{');
        out.push_str(&d.tag);
        for a in &d.args {
            out.push('\n');
            out.push_str(&"  ".repeat(depth + 1));
            match a {
                DescItem::Node(n) => go(n, depth + 1, out),
                DescItem::Text(s) => out.push_str(&quote(s)),
            }
        }
        out.push('}');
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out
}

/// Parses a description string against the built-in tag set.
pub fn parse_desc(input: &str) -> Result<DescNode, DescError> {
    parse_desc_with(input, &TagRegistry::default())
}

pub fn parse_desc_with(input: &str, registry: &TagRegistry) -> Result<DescNode, DescError> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
        registry,
    };
    p.skip_ws();
    let node = p.element()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("end of input"));
    }
    Ok(node)
}

struct Parser<'r> {
    chars: Vec<char>,
    pos: usize,
    registry: &'r TagRegistry,
}

impl Parser<'_> {
    fn error_at(&self, pos: usize, expected: &str) -> DescError {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        DescError::Syntax {
            line,
            column,
            expected: expected.to_string(),
        }
    }

    fn error(&self, expected: &str) -> DescError {
        self.error_at(self.pos, expected)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn element(&mut self) -> Result<DescNode, DescError> {
        if self.peek() != Some('{') {
            return Err(self.error("'{'"));
        }
        self.pos += 1;
        self.skip_ws();
        let tag_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            self.pos += 1;
        }
        if self.pos == tag_start {
            return Err(self.error("tag name"));
        }
        let tag: String = self.chars[tag_start..self.pos].iter().collect();
        if !self.registry.contains(&tag) {
            return Err(self.error_at(tag_start, "registered tag"));
        }
        let mut args = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => break,
                Some('{') => args.push(DescItem::Node(self.element()?)),
                Some('"') => args.push(DescItem::Text(self.string()?)),
                _ => return Err(self.error("element, string or '}'")),
            }
        }
        let node = DescNode { tag, args };
        if let Err(expected) = self.registry.check_arity(&node) {
            return Err(self.error(&expected));
        }
        self.pos += 1;
        Ok(node)
    }

    fn string(&mut self) -> Result<String, DescError> {
        self.pos += 1;
        let mut s = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("closing '\"'")),
                Some('"') => {
                    self.pos += 1;
                    return Ok(s);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => {
                            s.push(c);
                            self.pos += 1;
                        }
                        _ => return Err(self.error("'\"' or '\\' after backslash")),
                    }
                }
                Some(c) => {
                    s.push(c);
                    self.pos += 1;
                }
            }
        }
    }
}
