//! Ready-made document builders used by tests, demos, and the CLI.

use crate::credential::{
    Assertion, BadgeClass, BlockcertsCertificate, DiplomaSupplement, IssuerProfileRef,
    RecipientProfile, SignatureLine, VerificationMethod,
};
use serde::{Deserialize, Serialize};

/// Identity fields of an issuing institution, as they appear both in
/// certificates and in the hosted profile. Also the on-disk victim fixture
/// format consumed by the attack demo.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerIdentity {
    pub name: String,
    pub url: String,
    pub email: String,
    /// URL of the hosted issuer profile (the issuer_id).
    pub profile_url: String,
    pub revocation_url: String,
}

impl IssuerIdentity {
    pub fn mock(slug: &str, name: &str) -> Self {
        IssuerIdentity {
            name: name.to_string(),
            url: format!("https://www.{slug}.example"),
            email: format!("records@{slug}.example"),
            profile_url: format!("mock://issuers/{slug}/profile"),
            revocation_url: format!("mock://issuers/{slug}/revocations"),
        }
    }

    pub fn as_ref(&self) -> IssuerProfileRef {
        IssuerProfileRef {
            issuer_id: self.profile_url.clone(),
            issuer_name: self.name.clone(),
            issuer_url: self.url.clone(),
            issuer_email: self.email.clone(),
            revocation_list: self.revocation_url.clone(),
        }
    }
}

pub fn sample_recipient(id: &str) -> RecipientProfile {
    RecipientProfile {
        id: id.to_string(),
        kind: "email".into(),
        name: Some("Test Student".into()),
        email: Some("student@example.org".into()),
        public_key: None,
    }
}

pub fn sample_badge(issuer: IssuerProfileRef) -> BadgeClass {
    BadgeClass {
        id: "urn:badge:msc-computer-engineering".into(),
        kind: "BadgeClass".into(),
        name: "MSc in Computer Engineering".into(),
        description: "Master's degree".into(),
        image: "data:image/png;base64,AAAA".into(),
        criteria: "Completion of the study programme".into(),
        issuer,
        alignment: None,
        tags: None,
    }
}

pub fn sample_certificate_for(
    issuer: &IssuerIdentity,
    assertion_id: &str,
    recipient_id: &str,
    issued_on: i64,
) -> BlockcertsCertificate {
    let assertion = Assertion {
        id: assertion_id.to_string(),
        kind: "Assertion".into(),
        recipient: sample_recipient(recipient_id),
        badge: sample_badge(issuer.as_ref()),
        verification: VerificationMethod::merkle_anchor_sim(),
        issued_on,
        expires: None,
        evidence: None,
        narrative: None,
        image: None,
        revoked: None,
        revocation_reason: None,
    };
    BlockcertsCertificate {
        assertion,
        supplement: Some(DiplomaSupplement::default()),
        signature_lines: Some(vec![SignatureLine {
            name: "The Rector".into(),
            title: "Rector".into(),
        }]),
        receipt: None,
    }
}

/// One fully populated, valid certificate with every mandatory field set.
pub fn sample_certificate() -> BlockcertsCertificate {
    sample_certificate_for(
        &IssuerIdentity::mock("unirc", "University of Reggio Calabria"),
        "urn:assertion:0001",
        "a1b2c3d4e5f60718293a4b5c6d7e8f9001020304",
        1_600_000_000,
    )
}
