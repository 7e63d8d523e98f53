//! Open Badges / Blockcerts document types, mandatory-field validation,
//! canonical serialization, and certificate hashing.

use crate::hash::{canonical_json_bytes, sha256, Digest};
use crate::merkle::MerkleReceipt;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

/// Reference to a hosted issuer profile, embedded in a badge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerProfileRef {
    /// URL where the hosted issuer profile can be found.
    pub issuer_id: String,
    pub issuer_name: String,
    pub issuer_url: String,
    pub issuer_email: String,
    /// URL of the list of revoked certificates.
    pub revocation_list: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipientProfile {
    /// Recipient identifier, here the recipient chain address.
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub email: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub public_key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadgeClass {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub name: String,
    pub description: String,
    /// Data URI or URL; carried opaquely.
    pub image: String,
    pub criteria: String,
    pub issuer: IssuerProfileRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<String>>,
}

/// How a certificate is meant to be verified: a method kind and a chain kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationMethod {
    pub method: String,
    pub chain: String,
}

impl VerificationMethod {
    pub fn merkle_anchor_sim() -> Self {
        VerificationMethod {
            method: "merkle-anchor".into(),
            chain: "sim".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    /// Unique certificate identifier.
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub recipient: RecipientProfile,
    pub badge: BadgeClass,
    pub verification: VerificationMethod,
    /// UTC epoch seconds.
    #[serde(rename = "issuedOn")]
    pub issued_on: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expires: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub narrative: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revoked: Option<bool>,
    #[serde(rename = "revocationReason", skip_serializing_if = "Option::is_none")]
    pub revocation_reason: Option<String>,
}

/// The eight standard diploma-supplement sections, in order. Sections may be
/// empty maps but always exist.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DiplomaSupplement {
    pub holder: std::collections::BTreeMap<String, String>,
    pub qualification: std::collections::BTreeMap<String, String>,
    pub level: std::collections::BTreeMap<String, String>,
    #[serde(rename = "contents-and-results")]
    pub contents_and_results: std::collections::BTreeMap<String, String>,
    pub function: std::collections::BTreeMap<String, String>,
    pub additional: std::collections::BTreeMap<String, String>,
    pub issuer: std::collections::BTreeMap<String, String>,
    #[serde(rename = "national-system")]
    pub national_system: std::collections::BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureLine {
    pub name: String,
    pub title: String,
}

/// The signed credential document. A certificate is "signed" iff `receipt`
/// is present; the receipt never participates in the certificate hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockcertsCertificate {
    pub assertion: Assertion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub supplement: Option<DiplomaSupplement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature_lines: Option<Vec<SignatureLine>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receipt: Option<MerkleReceipt>,
}

impl BlockcertsCertificate {
    pub fn is_signed(&self) -> bool {
        self.receipt.is_some()
    }
}

/// One violated invariant: which field, and the rule it broke.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn mandatory(field: &str) -> Self {
        Violation {
            field: field.into(),
            rule: "mandatory field must be present and non-empty".into(),
        }
    }

    fn url(field: &str, detail: &str) -> Self {
        Violation {
            field: field.into(),
            rule: format!("must be a URL with a supported scheme: {detail}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CredentialError {
    #[error("certificate is invalid: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("serialization failed: {0}")]
    Serialization(#[from] serde_json::Error),
}

const SUPPORTED_SCHEMES: &[&str] = &["mock", "file", "http", "https"];

fn check_url(field: &str, value: &str, out: &mut Vec<Violation>) {
    match Url::parse(value) {
        Ok(url) if SUPPORTED_SCHEMES.contains(&url.scheme()) => {}
        Ok(url) => out.push(Violation::url(
            field,
            &format!("unsupported scheme '{}'", url.scheme()),
        )),
        Err(e) => out.push(Violation::url(field, &e.to_string())),
    }
}

/// Check every mandatory-field and structural invariant. Violations are data,
/// not errors: the empty list means the certificate is valid.
pub fn validate(cert: &BlockcertsCertificate) -> Vec<Violation> {
    let mut out = Vec::new();
    let a = &cert.assertion;

    if a.id.is_empty() {
        out.push(Violation::mandatory("assertion.id"));
    }
    if a.kind.is_empty() {
        out.push(Violation::mandatory("assertion.type"));
    }
    if a.recipient.id.is_empty() {
        out.push(Violation::mandatory("recipient.id"));
    }
    if a.recipient.kind.is_empty() {
        out.push(Violation::mandatory("recipient.type"));
    }
    if a.verification.method.is_empty() {
        out.push(Violation::mandatory("verification.method"));
    }
    if let Some(expires) = a.expires {
        if expires <= a.issued_on {
            out.push(Violation {
                field: "assertion.expires".into(),
                rule: "expires must be strictly greater than issuedOn".into(),
            });
        }
    }

    let b = &a.badge;
    if b.id.is_empty() {
        out.push(Violation::mandatory("badge.id"));
    }
    if b.kind.is_empty() {
        out.push(Violation::mandatory("badge.type"));
    }
    if b.name.is_empty() {
        out.push(Violation::mandatory("badge.name"));
    }
    if b.description.is_empty() {
        out.push(Violation::mandatory("badge.description"));
    }
    if b.image.is_empty() {
        out.push(Violation::mandatory("badge.image"));
    }
    if b.criteria.is_empty() {
        out.push(Violation::mandatory("badge.criteria"));
    }

    let issuer = &b.issuer;
    if issuer.issuer_id.is_empty() {
        out.push(Violation::mandatory("issuer.issuer_id"));
    } else {
        check_url("issuer.issuer_id", &issuer.issuer_id, &mut out);
    }
    if issuer.issuer_name.is_empty() {
        out.push(Violation::mandatory("issuer.issuer_name"));
    }
    if issuer.issuer_url.is_empty() {
        out.push(Violation::mandatory("issuer.issuer_url"));
    } else {
        check_url("issuer.issuer_url", &issuer.issuer_url, &mut out);
    }
    if issuer.issuer_email.is_empty() {
        out.push(Violation::mandatory("issuer.issuer_email"));
    }
    if !issuer.revocation_list.is_empty() {
        check_url("issuer.revocation_list", &issuer.revocation_list, &mut out);
    }

    out
}

/// Deterministic byte encoding of the certificate with the receipt stripped:
/// sorted keys, minified UTF-8 JSON, timestamps as integer epoch seconds.
pub fn canonical_bytes(cert: &BlockcertsCertificate) -> Result<Vec<u8>, CredentialError> {
    let violations = validate(cert);
    if !violations.is_empty() {
        return Err(CredentialError::Invalid(violations));
    }
    let mut stripped = cert.clone();
    stripped.receipt = None;
    Ok(canonical_json_bytes(&stripped)?)
}

/// SHA-256 over the canonical bytes.
pub fn certificate_hash(cert: &BlockcertsCertificate) -> Result<Digest, CredentialError> {
    Ok(sha256(&canonical_bytes(cert)?))
}
