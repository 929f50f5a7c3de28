//! Minimal deterministic tokenizer: whitespace split, detached edge
//! punctuation, optional lowercasing.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig { lowercase: true }
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Splits `text` into tokens.
///
/// Each whitespace-delimited chunk has its leading and trailing punctuation
/// characters split off one character per token; punctuation inside a word
/// (`l'environnement`, `so-called`) stays attached.
pub fn tokenize(text: &str, options: &TokenizerConfig) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<(usize, char)> = chunk.char_indices().collect();
        let mut lo = 0;
        while lo < chars.len() && is_punct(chars[lo].1) {
            lo += 1;
        }
        if lo == chars.len() {
            out.extend(chars.iter().map(|&(_, c)| c.to_string()));
            continue;
        }
        let mut hi = chars.len();
        while hi > lo && is_punct(chars[hi - 1].1) {
            hi -= 1;
        }
        out.extend(chars[..lo].iter().map(|&(_, c)| c.to_string()));
        let start = chars[lo].0;
        let end = chars.get(hi).map_or(chunk.len(), |&(i, _)| i);
        out.push(chunk[start..end].to_string());
        out.extend(chars[hi..].iter().map(|&(_, c)| c.to_string()));
    }
    if options.lowercase {
        for token in &mut out {
            *token = token.to_lowercase();
        }
    }
    out
}
