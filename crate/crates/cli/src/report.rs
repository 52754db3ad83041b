//! Reports and their two renderings.
//!
//! JSON layout (`schema = "glsm-lab.report/1"`):
//!
//! ```json
//! {
//!   "schema": "glsm-lab.report/1",
//!   "command": { "name": "phases", "model": "quintic.toml", "options": {} },
//!   "input_digest": "sha256:…",
//!   "payload": { … },
//!   "warnings": [],
//!   "certificates": [ { "claim": "…", "certificate": { … } } ]
//! }
//! ```
//!
//! Rationals are always strings (`"-3/5"`), never floats. Object keys keep
//! insertion order, so identical input gives identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "glsm-lab.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub model: String,
    pub options: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certified {
    pub claim: String,
    pub certificate: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: CommandEcho,
    pub input_digest: String,
    pub payload: Value,
    pub warnings: Vec<String>,
    pub certificates: Vec<Certified>,
    #[serde(skip)]
    pub text: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let mut line = |s: &str| {
        out.push_str(s);
        out.push('\n');
    };
    line(&format!("glsm-lab {}", r.command.name));
    line(&format!("model:  {}", r.command.model));
    line(&format!("digest: {}", r.input_digest));
    for (k, v) in &r.command.options {
        line(&format!("option: {k} = {v}"));
    }
    line("");
    for t in &r.text {
        line(t);
    }
    if !r.certificates.is_empty() {
        line("");
        line("certificates:");
        for c in &r.certificates {
            line(&format!("  {}: {}", c.claim, serde_json::to_string(&c.certificate).expect("json")));
        }
    }
    line("");
    if r.warnings.is_empty() {
        line("warnings: none");
    } else {
        line("warnings:");
        for w in &r.warnings {
            line(&format!("  {w}"));
        }
    }
    out
}
