//! Name patterns.
//!
//! A pattern is a `/`-separated sequence of tokens:
//!
//! | token      | matches                                           |
//! |------------|---------------------------------------------------|
//! | `literal`  | exactly that component                            |
//! | `<>`       | any one component                                 |
//! | `<>*`      | zero or more components                           |
//! | `<name>`   | one component, captured as `name`                 |
//! | `<name>*`  | zero or more components, captured as `name`       |
//!
//! A capture name that is already bound must match the bound components
//! again, which is how a signer pattern refers back to the data name.

use std::collections::BTreeMap;
use std::fmt;

use ndn_core::{Component, Name};

use crate::error::PatternError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Literal(Component),
    One(Option<String>),
    Many(Option<String>),
}

pub type Captures = BTreeMap<String, Vec<Component>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    tokens: Vec<Token>,
    text: String,
}

impl Pattern {
    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        let body = text.strip_prefix('/').ok_or_else(|| PatternError::new(text, "must start with '/'"))?;
        let mut tokens = Vec::new();
        for part in body.split('/').filter(|p| !p.is_empty()) {
            let token = if let Some(inner) = part.strip_prefix('<') {
                let (inner, many) = match inner.strip_suffix(">*") {
                    Some(i) => (i, true),
                    None => (
                        inner.strip_suffix('>').ok_or_else(|| PatternError::new(text, "unclosed '<'"))?,
                        false,
                    ),
                };
                if !inner.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(PatternError::new(text, "capture names are alphanumeric"));
                }
                let name = (!inner.is_empty()).then(|| inner.to_owned());
                if many {
                    Token::Many(name)
                } else {
                    Token::One(name)
                }
            } else {
                if part.contains(['<', '>']) {
                    return Err(PatternError::new(text, "stray '<' or '>'"));
                }
                Token::Literal(part.parse().map_err(|_| PatternError::new(text, "bad literal component"))?)
            };
            tokens.push(token);
        }
        Ok(Pattern { tokens, text: text.to_owned() })
    }

    /// Capture names in order of first appearance.
    pub fn capture_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in &self.tokens {
            if let Token::One(Some(n)) | Token::Many(Some(n)) = t {
                if !out.contains(&n.as_str()) {
                    out.push(n);
                }
            }
        }
        out
    }

    pub fn matches(&self, name: &Name) -> bool {
        self.match_with(name, &Captures::new(), &mut |_| true)
    }

    /// Backtracking match. `accept` is called for every complete binding of
    /// the captures consistent with `bound`; the match succeeds as soon as it
    /// returns true.
    pub fn match_with(&self, name: &Name, bound: &Captures, accept: &mut dyn FnMut(&Captures) -> bool) -> bool {
        let mut caps = bound.clone();
        step(&self.tokens, name.components(), &mut caps, accept)
    }
}

fn step(tokens: &[Token], comps: &[Component], caps: &mut Captures, accept: &mut dyn FnMut(&Captures) -> bool) -> bool {
    let Some((tok, rest)) = tokens.split_first() else {
        return comps.is_empty() && accept(caps);
    };
    match tok {
        Token::Literal(c) => comps.first() == Some(c) && step(rest, &comps[1..], caps, accept),
        Token::One(None) => !comps.is_empty() && step(rest, &comps[1..], caps, accept),
        Token::Many(None) => (0..=comps.len()).any(|n| step(rest, &comps[n..], caps, accept)),
        Token::One(Some(cap)) | Token::Many(Some(cap)) => {
            let many = matches!(tok, Token::Many(_));
            if let Some(bound) = caps.get(cap) {
                let n = bound.len();
                return comps.len() >= n && comps[..n] == bound[..] && step(rest, &comps[n..], caps, accept);
            }
            let lengths: Vec<usize> = if many { (0..=comps.len()).collect() } else if comps.is_empty() { vec![] } else { vec![1] };
            for n in lengths {
                caps.insert(cap.clone(), comps[..n].to_vec());
                if step(rest, &comps[n..], caps, accept) {
                    caps.remove(cap);
                    return true;
                }
            }
            caps.remove(cap);
            false
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
