//! Safe-list files: one method name per line, `#` starts a comment.

use std::collections::BTreeSet;

pub fn parse_safe_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}
