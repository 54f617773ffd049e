//! Report records. One JSON object per line; field order is fixed by the
//! struct definitions so equal runs serialize to equal bytes.

use serde::Serialize;

use crate::config::Expected;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Success,
    Denied,
    Error,
}

impl Outcome {
    pub fn meets(self, expected: Expected) -> bool {
        matches!(
            (self, expected),
            (Outcome::Success, Expected::Success) | (Outcome::Denied, Expected::Denied)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "camelCase")]
pub enum Event {
    #[serde(rename_all = "camelCase")]
    Scenario {
        name: String,
        abe_type: String,
        seed: u64,
        nodes: usize,
        links: usize,
        mss: usize,
    },
    #[serde(rename_all = "camelCase")]
    Dkey {
        consumer: String,
        dkey: String,
        version: u64,
        dkey_bytes: usize,
        abe_key_bytes: usize,
        segments: usize,
    },
    #[serde(rename_all = "camelCase")]
    Production {
        producer: String,
        name: String,
        tag: String,
        ck: String,
        ck_minted: bool,
        ck_bytes: usize,
        ck_segments: usize,
        payload_bytes: usize,
        virtual_ms: u64,
    },
    #[serde(rename_all = "camelCase")]
    Validation {
        role: String,
        name: String,
        outcome: String,
        chain_length: usize,
        anchor_terminated: bool,
    },
    #[serde(rename_all = "camelCase")]
    Consumption {
        consumer: String,
        name: String,
        expected: Expected,
        outcome: Outcome,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
        matched: bool,
        aa_detached: bool,
        fresh: bool,
        /// Interests the authority's application answered during this consumption.
        aa_served: u64,
        virtual_ms: u64,
    },
    #[serde(rename_all = "camelCase")]
    Counters {
        interests_expressed: u64,
        interests_forwarded: u64,
        interests_to_producers: u64,
        data_from_producers: u64,
        data_delivered: u64,
        cache_hits: u64,
        timeouts: u64,
        retransmissions: u64,
        lost_on_link: u64,
    },
    #[serde(rename_all = "camelCase")]
    Summary {
        consumptions: usize,
        matched: usize,
        mismatched: Vec<String>,
        ck_objects: usize,
        dkey_objects: usize,
        validations: usize,
        validations_failed: usize,
        virtual_ms: u64,
    },
}

/// Everything a run produced, in emission order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub events: Vec<Event>,
}

impl RunReport {
    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn consumptions(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e, Event::Consumption { .. }))
    }

    pub fn validations(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e, Event::Validation { .. }))
    }

    /// Names of consumptions whose outcome differs from the expectation.
    pub fn mismatches(&self) -> Vec<String> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Consumption {
                    consumer, name, matched: false, ..
                } => Some(format!("{consumer} {name}")),
                _ => None,
            })
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.mismatches().is_empty()
    }

    pub fn human_summary(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            match e {
                Event::Scenario { name, abe_type, seed, .. } => {
                    out.push_str(&format!("scenario {name} ({abe_type}, seed {seed})\n"));
                }
                Event::Dkey {
                    consumer,
                    dkey_bytes,
                    segments,
                    ..
                } => out.push_str(&format!("  dkey for {consumer}: {dkey_bytes} bytes in {segments} segments\n")),
                Event::Consumption {
                    consumer,
                    name,
                    expected,
                    outcome,
                    matched,
                    error,
                    ..
                } => {
                    let mark = if *matched { "ok  " } else { "FAIL" };
                    let expected = match expected {
                        Expected::Success => "SUCCESS",
                        Expected::Denied => "DENIED",
                    };
                    let outcome = serde_json::to_value(outcome).expect("outcome serializes");
                    let outcome = outcome.as_str().unwrap_or_default();
                    out.push_str(&format!("  {mark} {consumer} {name}: {outcome} (expected {expected})"));
                    if let Some(err) = error {
                        out.push_str(&format!(" [{err}]"));
                    }
                    out.push('\n');
                }
                Event::Summary {
                    consumptions,
                    matched,
                    ck_objects,
                    dkey_objects,
                    validations,
                    validations_failed,
                    virtual_ms,
                    ..
                } => {
                    out.push_str(&format!(
                        "{matched}/{consumptions} expectations met; {ck_objects} CK objects, {dkey_objects} DKEY objects; \
                         {validations} validations ({validations_failed} failed); {virtual_ms} ms virtual\n"
                    ));
                }
                _ => {}
            }
        }
        out
    }
}
