//! Parser for the numbered plain-text lists providers are asked to return.
//!
//! ```text
//! Here are your options:
//! 1. You admit a candidate with ...
//! 2) [provocative] storytelling
//! ```
//!
//! Lines before the first item and after the last are treated as chatter and
//! skipped. Item numbers must run 1, 2, 3, ... without gaps. An optional
//! `[tag]` prefix is split off. Any other irregularity rejects the whole
//! response.

use serde::{Deserialize, Serialize};

pub const MAX_ITEM_CHARS: usize = 400;
const MAX_NUMBER_DIGITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListItem {
    pub number: usize,
    pub tag: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("response contains no numbered items")]
    NoItems,
    #[error("item numbered {found} where {expected} was expected")]
    Numbering { expected: usize, found: usize },
    #[error("item {number} is empty")]
    EmptyItem { number: usize },
    #[error("item {number} exceeds {MAX_ITEM_CHARS} characters")]
    ItemTooLong { number: usize },
    #[error("item {number} has an unterminated tag")]
    BadTag { number: usize },
}

pub fn parse_numbered_list(raw: &str) -> Result<Vec<ListItem>, ParseError> {
    let mut items: Vec<ListItem> = Vec::new();
    let mut ended = false;
    for line in raw.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((number, rest)) = split_number(line) else {
            if !items.is_empty() {
                ended = true;
            }
            continue;
        };
        let expected = items.len() + 1;
        if ended || number != expected {
            return Err(ParseError::Numbering {
                expected,
                found: number,
            });
        }
        let (tag, text) = split_tag(rest).ok_or(ParseError::BadTag { number })?;
        let text = clean(text);
        if text.is_empty() {
            return Err(ParseError::EmptyItem { number });
        }
        if text.chars().count() > MAX_ITEM_CHARS {
            return Err(ParseError::ItemTooLong { number });
        }
        items.push(ListItem {
            number,
            tag,
            text: text.to_string(),
        });
    }
    if items.is_empty() {
        Err(ParseError::NoItems)
    } else {
        Ok(items)
    }
}

/// `"12. text"` or `"12) text"` -> `(12, "text")`.
fn split_number(line: &str) -> Option<(usize, &str)> {
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 || digits > MAX_NUMBER_DIGITS {
        return None;
    }
    let rest = &line[digits..];
    let rest = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    // "1.5 million" is prose, not an item.
    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        return None;
    }
    Some((line[..digits].parse().ok()?, rest.trim_start()))
}

fn split_tag(text: &str) -> Option<(Option<String>, &str)> {
    let Some(inner) = text.strip_prefix('[') else {
        return Some((None, text));
    };
    let end = inner.find(']')?;
    let tag = inner[..end].trim().to_lowercase();
    Some((Some(tag), &inner[end + 1..]))
}

fn clean(text: &str) -> &str {
    let mut text = text.trim();
    loop {
        let stripped = text
            .strip_prefix("**")
            .and_then(|t| t.strip_suffix("**"))
            .or_else(|| text.strip_prefix('"').and_then(|t| t.strip_suffix('"')))
            .or_else(|| text.strip_prefix('\u{201c}').and_then(|t| t.strip_suffix('\u{201d}')));
        match stripped {
            Some(inner) => text = inner.trim(),
            None => return text,
        }
    }
}
