use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Characters that end a sub-sentence.
pub const DELIMITERS: [char; 4] = [',', '.', '!', '?'];

/// Characters split off as tokens of their own.
const DETACHED: &[char] = &[',', '.', '!', '?', ';', ':', '"', '(', ')', '[', ']', '{', '}'];

/// Splits a paragraph after every delimiter. The delimiter stays with the
/// preceding segment; segments holding nothing but whitespace and delimiters
/// are dropped.
pub fn segment_paragraph(text: &str) -> Result<Vec<String>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput("paragraph text is empty"));
    }
    let mut out = Vec::new();
    let mut start = 0;
    let mut push = |seg: &str| {
        let seg = seg.trim();
        if seg.chars().any(|c| !c.is_whitespace() && !DELIMITERS.contains(&c)) {
            out.push(seg.to_string());
        }
    };
    for (i, c) in text.char_indices() {
        if DELIMITERS.contains(&c) {
            let end = i + c.len_utf8();
            push(&text[start..end]);
            start = end;
        }
    }
    push(&text[start..]);
    Ok(out)
}

/// Lowercases and splits on whitespace, detaching punctuation into separate
/// tokens. Hyphens and apostrophes stay inside words.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in sentence.split_whitespace() {
        let mut cur = String::new();
        for c in word.chars() {
            if DETACHED.contains(&c) {
                if !cur.is_empty() {
                    tokens.push(core::mem::take(&mut cur));
                }
                tokens.push(c.to_string());
            } else {
                cur.extend(c.to_lowercase());
            }
        }
        if !cur.is_empty() {
            tokens.push(cur);
        }
    }
    tokens
}
