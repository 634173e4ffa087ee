use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::desc::{DescItem, DescNode};
use crate::layout::{Laid, LayoutCx};

pub const BUILTIN_TAGS: [&str; 8] = ["plain-text", "tree", "drs", "avm", "hbox", "vbox", "frame", "active"];

/// Extension point for new element kinds.
pub trait TagPlugin: Send + Sync {
    fn tag(&self) -> &str;

    /// Returns what was expected when the element's arguments are malformed.
    fn check_arity(&self, node: &DescNode) -> Result<(), String>;

    /// Lays out the element relative to its own origin.
    fn layout(&self, node: &DescNode, cx: &mut LayoutCx<'_>, path: &[usize]) -> Laid;
}

#[derive(Clone, Default)]
pub struct TagRegistry {
    plugins: BTreeMap<String, Arc<dyn TagPlugin>>,
}

impl fmt::Debug for TagRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TagRegistry")
            .field("plugins", &self.plugins.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl TagRegistry {
    /// Registers a plugin. Built-in tags cannot be replaced.
    pub fn register(&mut self, plugin: Arc<dyn TagPlugin>) -> bool {
        let tag = plugin.tag().to_string();
        if BUILTIN_TAGS.contains(&tag.as_str()) {
            return false;
        }
        self.plugins.insert(tag, plugin);
        true
    }

    pub fn contains(&self, tag: &str) -> bool {
        BUILTIN_TAGS.contains(&tag) || self.plugins.contains_key(tag)
    }

    pub fn plugin(&self, tag: &str) -> Option<&Arc<dyn TagPlugin>> {
        self.plugins.get(tag)
    }

    pub fn tags(&self) -> Vec<String> {
        BUILTIN_TAGS
            .iter()
            .map(|t| t.to_string())
            .chain(self.plugins.keys().cloned())
            .collect()
    }

    pub(crate) fn check_arity(&self, node: &DescNode) -> Result<(), String> {
        let n = node.args.len();
        let texts = node.args.iter().filter(|a| matches!(a, DescItem::Text(_))).count();
        match node.tag.as_str() {
            "plain-text" if n != 1 || texts != 1 => Err("exactly one string".into()),
            "tree" | "drs" if n == 0 => Err("a mother element".into()),
            "avm" if !n.is_multiple_of(2) => Err("feature/value pairs".into()),
            "frame" if n != 1 => Err("exactly one child".into()),
            "active" => match node.args.as_slice() {
                [DescItem::Text(_), _] => Ok(()),
                _ => Err("an action string followed by one child".into()),
            },
            tag => match self.plugins.get(tag) {
                Some(p) => p.check_arity(node),
                None => Ok(()),
            },
        }
    }
}
