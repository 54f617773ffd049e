//! Schema files.
//!
//! ```text
//! # comment
//! anchor: <base64 of the encoded anchor certificate>
//! rule <id>: <data pattern> => <signer pattern | anchor>
//! ```
//!
//! Rules are tried in file order and the first whose data pattern matches
//! the packet name decides.

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use ndn_core::{Certificate, Data, Name};

use crate::error::SchemaError;
use crate::pattern::{Captures, Pattern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Signer {
    /// The key locator must name the trust anchor's key.
    Anchor,
    Pattern(Pattern),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaRule {
    pub id: String,
    pub data: Pattern,
    pub signer: Signer,
}

impl SchemaRule {
    /// Whether `signer_name` is an acceptable signer for `data_name`.
    pub fn allows(&self, data_name: &Name, signer_name: &Name, anchor_key: &Name) -> bool {
        match &self.signer {
            Signer::Anchor => {
                self.data.matches(data_name) && ndn_core::security::key_name_of(signer_name).as_ref() == Some(anchor_key)
            }
            Signer::Pattern(sp) => self
                .data
                .match_with(data_name, &Captures::new(), &mut |caps| sp.match_with(signer_name, caps, &mut |_| true)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustSchema {
    pub rules: Vec<SchemaRule>,
    pub anchor: Certificate,
}

impl TrustSchema {
    pub fn new(rules: Vec<SchemaRule>, anchor: Certificate) -> Result<TrustSchema, SchemaError> {
        if rules.is_empty() {
            return Err(SchemaError::NoRules);
        }
        for r in &rules {
            check_captures(r)?;
        }
        if !anchor.is_self_signed() {
            return Err(SchemaError::BadAnchor("not self-signed".into()));
        }
        if !anchor.verify(anchor.data()) {
            return Err(SchemaError::BadAnchor("does not verify against its own key".into()));
        }
        Ok(TrustSchema { rules, anchor })
    }

    /// First rule whose data pattern matches `name`.
    pub fn rule_for(&self, name: &Name) -> Option<&SchemaRule> {
        self.rules.iter().find(|r| r.data.matches(name))
    }

    pub fn without_rule(&self, id: &str) -> TrustSchema {
        TrustSchema {
            rules: self.rules.iter().filter(|r| r.id != id).cloned().collect(),
            anchor: self.anchor.clone(),
        }
    }

    /// Renders the schema in the file format accepted by [`load_schema`].
    pub fn to_text(&self) -> String {
        let mut out = format!("anchor: {}\n", anchor_base64(&self.anchor));
        for r in &self.rules {
            let signer = match &r.signer {
                Signer::Anchor => "anchor".to_owned(),
                Signer::Pattern(p) => p.to_string(),
            };
            out.push_str(&format!("rule {}: {} => {}\n", r.id, r.data, signer));
        }
        out
    }
}

pub fn anchor_base64(anchor: &Certificate) -> String {
    STANDARD.encode(anchor.data().encode().expect("certificates are encodable"))
}

fn check_captures(rule: &SchemaRule) -> Result<(), SchemaError> {
    let Signer::Pattern(sp) = &rule.signer else {
        return Ok(());
    };
    let defined = rule.data.capture_names();
    for cap in sp.capture_names() {
        if !defined.contains(&cap) {
            return Err(SchemaError::UndefinedCapture {
                rule: rule.id.clone(),
                capture: cap.to_owned(),
            });
        }
    }
    Ok(())
}

pub fn load_schema(text: &str) -> Result<TrustSchema, SchemaError> {
    let mut anchor = None;
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| SchemaError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(b64) = line.strip_prefix("anchor:") {
            if anchor.is_some() {
                return Err(err("duplicate anchor".into()));
            }
            let bytes = STANDARD
                .decode(b64.trim())
                .map_err(|e| err(format!("anchor is not base64: {e}")))?;
            let data = Data::decode(&bytes).map_err(|e| err(format!("anchor is not a Data packet: {e}")))?;
            let cert = Certificate::from_data(data).map_err(|e| err(format!("anchor is not a certificate: {e}")))?;
            anchor = Some(cert);
        } else if let Some(rest) = line.strip_prefix("rule ") {
            let (id, body) = rest.split_once(':').ok_or_else(|| err("expected 'rule <id>: ...'".into()))?;
            let id = id.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(err("rule id must be one word".into()));
            }
            if rules.iter().any(|r: &SchemaRule| r.id == id) {
                return Err(err(format!("duplicate rule id {id}")));
            }
            let (data, signer) = body.split_once("=>").ok_or_else(|| err("expected '=>'".into()))?;
            let data = Pattern::parse(data.trim()).map_err(|e| err(e.to_string()))?;
            let signer = match signer.trim() {
                "anchor" => Signer::Anchor,
                s => Signer::Pattern(Pattern::parse(s).map_err(|e| err(e.to_string()))?),
            };
            let rule = SchemaRule { id: id.to_owned(), data, signer };
            check_captures(&rule)?;
            rules.push(rule);
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    let anchor = anchor.ok_or(SchemaError::MissingAnchor)?;
    TrustSchema::new(rules, anchor)
}

/// The health-monitoring hierarchy: the anchor certifies the authority,
/// producers and consumers; the authority signs parameters and decryption
/// keys; producers sign everything else under `/org/mhealth`.
///
/// Rule order matters under first match: the catch-all application rule
/// must come last or it would shadow the others.
pub fn mhealth_schema_text(anchor: &Certificate) -> String {
    format!(
        "anchor: {}\n\
         rule pubparams: /<aa>*/PUBPARAMS/<>*        => /<aa>*/KEY/<>*\n\
         rule dkey:      /<aa>*/DKEY/<>*             => /<aa>*/KEY/<>*\n\
         rule entity:    /org/mhealth/<role>/<>/KEY/<>* => anchor\n\
         rule app-data:  /org/mhealth/<>*            => /org/mhealth/producer/<>/KEY/<>*\n",
        anchor_base64(anchor)
    )
}
