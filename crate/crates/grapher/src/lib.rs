//! A standalone structure grapher.
//!
//! Structures are described by *description strings* such as
//!
//! ```text
//! {tree {plain-text "S"} {plain-text "NP"} {plain-text "VP"}}
//! ```
//!
//! which carry no positioning information. [`layout`] turns a parsed
//! [`DescNode`] into positioned [`LayoutBox`]es, which can be rendered with
//! [`render_svg`] or [`render_ascii`]. Boxes produced under an `active`
//! element carry its action identifier, which is how an application learns
//! which region of the display was clicked.
//!
//! ```
//! use semwork_grapher::{layout, parse_desc, render_svg, Style};
//!
//! let d = parse_desc(r#"{tree {plain-text "S"} {plain-text "NP"} {plain-text "VP"}}"#).unwrap();
//! let style = Style::default();
//! let svg = render_svg(&layout(&d, &style), &style);
//! assert_eq!(svg.matches("<line").count(), 2);
//! ```

pub mod desc;
pub mod layout;
pub mod registry;
pub mod render;

pub use desc::{parse_desc, parse_desc_with, print_desc, print_desc_pretty, DescError, DescItem, DescNode};
pub use layout::{bounds, layout, layout_with, BoxKind, Laid, LayoutBox, LayoutCx, Payload, Style};
pub use registry::{TagPlugin, TagRegistry, BUILTIN_TAGS};
pub use render::{render_ascii, render_svg};
