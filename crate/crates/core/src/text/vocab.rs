use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tokenize;

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

/// Token ↔ id map with `PAD = 0` and `UNK = 1` reserved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::from_tokens(Vec::new())
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(tokens: Vec<String>) -> Self {
        let mut v = Self {
            tokens: Vec::new(),
            index: BTreeMap::new(),
        };
        for t in tokens {
            v.push(t);
        }
        v.ensure_reserved();
        v
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

impl Vocabulary {
    /// Builds a vocabulary from the reserved entries followed by `tokens`.
    pub fn from_tokens<I: IntoIterator<Item = String>>(tokens: I) -> Self {
        let mut v = Self {
            tokens: Vec::new(),
            index: BTreeMap::new(),
        };
        v.ensure_reserved();
        for t in tokens {
            v.push(t);
        }
        v
    }

    fn ensure_reserved(&mut self) {
        if self.tokens.first().map(String::as_str) != Some(PAD_TOKEN)
            || self.tokens.get(1).map(String::as_str) != Some(UNK_TOKEN)
        {
            let rest: Vec<String> = core::mem::take(&mut self.tokens)
                .into_iter()
                .filter(|t| t != PAD_TOKEN && t != UNK_TOKEN)
                .collect();
            self.index.clear();
            self.push(PAD_TOKEN.to_string());
            self.push(UNK_TOKEN.to_string());
            for t in rest {
                self.push(t);
            }
        }
    }

    fn push(&mut self, token: String) {
        if !self.index.contains_key(&token) {
            self.index.insert(token.clone(), self.tokens.len());
            self.tokens.push(token);
        }
    }

    /// Counts tokens over `texts` (each tokenized with [`tokenize`]) and keeps
    /// those seen at least `min_count` times, most frequent first, ties in
    /// lexicographic order.
    pub fn build<'a, I: IntoIterator<Item = &'a str>>(texts: I, min_count: usize) -> Self {
        Self::build_from_tokens(texts.into_iter().map(tokenize), min_count)
    }

    /// Like [`Vocabulary::build`] over already tokenized sequences.
    pub fn build_from_tokens<I, S>(sequences: I, min_count: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = String>,
    {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for seq in sequences {
            for t in seq {
                *counts.entry(t).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> = counts
            .into_iter()
            .filter(|(t, c)| *c >= min_count.max(1) && t != PAD_TOKEN && t != UNK_TOKEN)
            .collect();
        // BTreeMap order is lexicographic and the sort is stable.
        ranked.sort_by(|a, b| b.1.cmp(&a.1));
        Self::from_tokens(ranked.into_iter().map(|(t, _)| t))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }

    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter()
            .map(|&i| self.token(i).unwrap_or(UNK_TOKEN).to_string())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::segment_paragraph;
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        let v = Vocabulary::build(["a a b"], 1);
        assert_eq!(v.tokens(), [PAD_TOKEN, UNK_TOKEN, "a", "b"]);
        assert_eq!((v.id("a"), v.id("b")), (2, 3));

        let v = Vocabulary::build(["a a b"], 2);
        assert_eq!(v.encode(&["a", "b"]), [2, UNK]);

        let v = Vocabulary::build(["zeta alpha"], 1);
        assert_eq!(v.tokens()[2..], ["alpha", "zeta"]);
    }

    #[test]
    fn serde_keeps_reserved_ids() {
        let v = Vocabulary::from(alloc::vec!["x".to_string()]);
        assert_eq!(v.tokens(), [PAD_TOKEN, UNK_TOKEN, "x"]);
        let v2 = Vocabulary::from(Vec::<String>::from(v.clone()));
        assert_eq!(v, v2);
    }

    proptest! {
        #[test]
        fn segment_tokenize_encode_decode_round_trips(words in proptest::collection::vec("[a-z]{1,5}", 1..30)) {
            let text = words.join(" ") + ".";
            let v = Vocabulary::build([text.as_str()], 1);
            for seg in segment_paragraph(&text).unwrap() {
                let toks = tokenize(&seg);
                prop_assert_eq!(v.decode(&v.encode(&toks)), toks);
            }
        }
    }
}
