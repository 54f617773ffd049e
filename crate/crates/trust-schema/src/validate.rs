use std::collections::HashMap;
use std::fmt;

use ndn_core::security::key_name_of;
use ndn_core::{Certificate, Data, Name};

use crate::naming::check_naming_convention;
use crate::schema::TrustSchema;

/// Longest certificate chain followed before giving up.
pub const MAX_CHAIN_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Valid,
    InvalidSignature,
    NoMatchingRule,
    ChainFetchFailed,
    AnchorMismatch,
    NamingViolation,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Valid => "VALID",
            Outcome::InvalidSignature => "INVALID_SIGNATURE",
            Outcome::NoMatchingRule => "NO_MATCHING_RULE",
            Outcome::ChainFetchFailed => "CHAIN_FETCH_FAILED",
            Outcome::AnchorMismatch => "ANCHOR_MISMATCH",
            Outcome::NamingViolation => "NAMING_VIOLATION",
        }
    }

    pub fn is_valid(self) -> bool {
        self == Outcome::Valid
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationResult {
    pub outcome: Outcome,
    /// Certificate names walked, ending at the anchor when valid.
    pub chain: Vec<Name>,
    /// Rule ids applied, one per chain step.
    pub rules: Vec<String>,
}

impl ValidationResult {
    fn fail(outcome: Outcome, chain: Vec<Name>, rules: Vec<String>) -> Self {
        ValidationResult { outcome, chain, rules }
    }
}

/// Validates a packet with no certificate cache.
pub fn validate(data: &Data, fetch: &mut dyn FnMut(&Name) -> Option<Data>, schema: &TrustSchema) -> ValidationResult {
    Validator::new(schema.clone()).validate(data, fetch)
}

/// Schema-driven validator that remembers certificates already chained to
/// the anchor.
#[derive(Debug, Clone)]
pub struct Validator {
    schema: TrustSchema,
    /// Key name -> (certificate, remainder of its chain to the anchor).
    verified: HashMap<Name, (Certificate, Vec<Name>)>,
    fetches: usize,
}

impl Validator {
    pub fn new(schema: TrustSchema) -> Self {
        Validator {
            schema,
            verified: HashMap::new(),
            fetches: 0,
        }
    }

    pub fn schema(&self) -> &TrustSchema {
        &self.schema
    }

    /// Certificates fetched over the lifetime of this validator.
    pub fn fetches(&self) -> usize {
        self.fetches
    }

    pub fn cached_certificates(&self) -> usize {
        self.verified.len()
    }

    pub fn clear_cache(&mut self) {
        self.verified.clear();
    }

    pub fn validate(&mut self, data: &Data, fetch: &mut dyn FnMut(&Name) -> Option<Data>) -> ValidationResult {
        if check_naming_convention(data).is_err() {
            return ValidationResult::fail(Outcome::NamingViolation, vec![], vec![]);
        }
        let anchor_key = self.schema.anchor.key_name();
        let mut chain: Vec<Name> = Vec::new();
        let mut rules: Vec<String> = Vec::new();
        // Certificates fetched in this walk, cached only once the walk succeeds.
        let mut walked: Vec<Certificate> = Vec::new();
        let mut current = data.clone();

        for _ in 0..MAX_CHAIN_DEPTH {
            let Some(rule) = self.schema.rule_for(&current.name) else {
                return ValidationResult::fail(Outcome::NoMatchingRule, chain, rules);
            };
            if !rule.allows(&current.name, &current.key_locator, &anchor_key) {
                return ValidationResult::fail(Outcome::NoMatchingRule, chain, rules);
            }
            rules.push(rule.id.clone());
            let signer_key = key_name_of(&current.key_locator);

            if signer_key.as_ref() == Some(&anchor_key) {
                if !self.schema.anchor.verify(&current) {
                    return ValidationResult::fail(Outcome::InvalidSignature, chain, rules);
                }
                chain.push(self.schema.anchor.name().clone());
                self.remember(walked, &chain);
                return ValidationResult {
                    outcome: Outcome::Valid,
                    chain,
                    rules,
                };
            }

            if let Some((cert, tail)) = signer_key.as_ref().and_then(|k| self.verified.get(k)) {
                if !cert.verify(&current) {
                    return ValidationResult::fail(Outcome::InvalidSignature, chain, rules);
                }
                chain.push(cert.name().clone());
                chain.extend(tail.iter().cloned());
                self.remember(walked, &chain);
                return ValidationResult {
                    outcome: Outcome::Valid,
                    chain,
                    rules,
                };
            }

            self.fetches += 1;
            let Some(cert) = fetch(&current.key_locator).and_then(|d| Certificate::from_data(d).ok()) else {
                return ValidationResult::fail(Outcome::ChainFetchFailed, chain, rules);
            };
            if !cert.verify(&current) {
                return ValidationResult::fail(Outcome::InvalidSignature, chain, rules);
            }
            if cert.is_self_signed() {
                return ValidationResult::fail(Outcome::AnchorMismatch, chain, rules);
            }
            chain.push(cert.name().clone());
            current = cert.data().clone();
            walked.push(cert);
        }
        ValidationResult::fail(Outcome::ChainFetchFailed, chain, rules)
    }

    fn remember(&mut self, walked: Vec<Certificate>, chain: &[Name]) {
        // walked[i] is chain[i]; its tail is everything after it.
        for (i, cert) in walked.into_iter().enumerate() {
            let tail = chain[i + 1..].to_vec();
            self.verified.insert(cert.key_name(), (cert, tail));
        }
    }
}
