//! Trust-anchor-signed identity attestations: the PKI countermeasure that
//! binds an issuer's name, profile URL, and key address to a certification
//! authority signature over a validity window.

use crate::hash::canonical_json_bytes;
use crate::ledger::{verify_signature, ChainAddress, Keypair};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttestationError {
    #[error("invalid validity window: valid_from {from} must precede valid_to {to}")]
    InvalidWindow { from: i64, to: i64 },
    #[error("duplicate trust anchor name: {0}")]
    DuplicateAnchor(String),
}

fn hex_bytes<S: serde::Serializer>(bytes: &Vec<u8>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode(bytes))
}

fn bytes_from_hex<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
    let s = String::deserialize(d)?;
    hex::decode(&s).map_err(serde::de::Error::custom)
}

/// A certification authority key accepted by the verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrustAnchor {
    pub name: String,
    #[serde(
        rename = "publicKey",
        serialize_with = "hex_bytes",
        deserialize_with = "bytes_from_hex"
    )]
    pub public_key: Vec<u8>,
}

/// The verifier's set of accepted certification-authority keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrustStore {
    anchors: Vec<TrustAnchor>,
}

impl TrustStore {
    pub fn new() -> TrustStore {
        TrustStore::default()
    }

    pub fn add(&mut self, anchor: TrustAnchor) -> Result<(), AttestationError> {
        if self.anchors.iter().any(|a| a.name == anchor.name) {
            return Err(AttestationError::DuplicateAnchor(anchor.name));
        }
        self.anchors.push(anchor);
        Ok(())
    }

    pub fn anchors(&self) -> &[TrustAnchor] {
        &self.anchors
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Trust store file: a JSON array of anchors.
    pub fn save(&self, path: &std::path::Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.anchors)?;
        std::fs::write(path, text)
    }

    pub fn load(path: &std::path::Path) -> std::io::Result<TrustStore> {
        let text = std::fs::read_to_string(path)?;
        let anchors: Vec<TrustAnchor> = serde_json::from_str(&text)?;
        Ok(TrustStore { anchors })
    }
}

/// Signed payload of an attestation; everything except the signature.
#[derive(Serialize)]
struct AttestationPayload<'a> {
    #[serde(rename = "subjectName")]
    subject_name: &'a str,
    #[serde(rename = "subjectProfileUrl")]
    subject_profile_url: &'a str,
    #[serde(rename = "subjectKeyAddress")]
    subject_key_address: &'a ChainAddress,
    #[serde(rename = "issuerCaName")]
    issuer_ca_name: &'a str,
    #[serde(rename = "validFrom")]
    valid_from: i64,
    #[serde(rename = "validTo")]
    valid_to: i64,
}

/// Trust-anchor-signed binding of an issuer identity to an issuer key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityAttestation {
    #[serde(rename = "subjectName")]
    pub subject_name: String,
    /// The issuer_id this attestation authorizes.
    #[serde(rename = "subjectProfileUrl")]
    pub subject_profile_url: String,
    #[serde(rename = "subjectKeyAddress")]
    pub subject_key_address: ChainAddress,
    #[serde(rename = "issuerCaName")]
    pub issuer_ca_name: String,
    #[serde(rename = "validFrom")]
    pub valid_from: i64,
    #[serde(rename = "validTo")]
    pub valid_to: i64,
    #[serde(serialize_with = "hex_bytes", deserialize_with = "bytes_from_hex")]
    pub signature: Vec<u8>,
}

impl IdentityAttestation {
    /// Canonical bytes the CA signs: sorted-key minified JSON of all fields
    /// except the signature.
    pub fn signed_bytes(&self) -> Vec<u8> {
        let payload = AttestationPayload {
            subject_name: &self.subject_name,
            subject_profile_url: &self.subject_profile_url,
            subject_key_address: &self.subject_key_address,
            issuer_ca_name: &self.issuer_ca_name,
            valid_from: self.valid_from,
            valid_to: self.valid_to,
        };
        canonical_json_bytes(&payload).expect("payload serializes")
    }

    pub fn verify_under(&self, ca_public_key: &[u8]) -> bool {
        verify_signature(ca_public_key, &self.signed_bytes(), &self.signature)
    }

    /// True iff some anchor in the store verifies the signature.
    pub fn verify_against_store(&self, store: &TrustStore) -> bool {
        store.anchors().iter().any(|a| self.verify_under(&a.public_key))
    }
}

/// Sign an identity binding as a certification authority.
pub fn issue_attestation(
    ca: &Keypair,
    ca_name: &str,
    subject_name: &str,
    subject_profile_url: &str,
    subject_key_address: ChainAddress,
    valid_from: i64,
    valid_to: i64,
) -> Result<IdentityAttestation, AttestationError> {
    if valid_from >= valid_to {
        return Err(AttestationError::InvalidWindow {
            from: valid_from,
            to: valid_to,
        });
    }
    let mut attestation = IdentityAttestation {
        subject_name: subject_name.to_string(),
        subject_profile_url: subject_profile_url.to_string(),
        subject_key_address,
        issuer_ca_name: ca_name.to_string(),
        valid_from,
        valid_to,
        signature: Vec::new(),
    };
    attestation.signature = ca.sign(&attestation.signed_bytes());
    Ok(attestation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ca() -> Keypair {
        Keypair::generate(Some(b"national accreditation body"))
    }

    fn subject_address() -> ChainAddress {
        Keypair::generate(Some(b"issuer key")).address()
    }

    fn sample() -> IdentityAttestation {
        issue_attestation(
            &ca(),
            "National CA",
            "University of Reggio Calabria",
            "mock://issuers/unirc/profile",
            subject_address(),
            1_000,
            2_000,
        )
        .unwrap()
    }

    #[test]
    fn issue_then_verify_round_trip() {
        let a = sample();
        assert!(a.verify_under(&ca().public_key()));
    }

    #[test]
    fn wrong_ca_key_fails() {
        let a = sample();
        let other = Keypair::generate(Some(b"some other ca"));
        assert!(!a.verify_under(&other.public_key()));
    }

    #[test]
    fn signed_bytes_are_deterministic() {
        let a = sample();
        let b = sample();
        assert_eq!(a.signed_bytes(), b.signed_bytes());
        assert_eq!(a.signature, b.signature);
    }

    #[test]
    fn invalid_window_is_rejected() {
        let err = issue_attestation(
            &ca(),
            "CA",
            "X",
            "mock://x/profile",
            subject_address(),
            2_000,
            2_000,
        );
        assert!(matches!(err, Err(AttestationError::InvalidWindow { .. })));
    }

    #[test]
    fn mutating_any_signed_field_breaks_the_signature() {
        let base = sample();
        let ca_key = ca().public_key();
        let mutations: Vec<Box<dyn Fn(&mut IdentityAttestation)>> = vec![
            Box::new(|a| a.subject_name.push('X')),
            Box::new(|a| a.subject_profile_url.push('X')),
            Box::new(|a| a.subject_key_address.0[0] ^= 1),
            Box::new(|a| a.issuer_ca_name.push('X')),
            Box::new(|a| a.valid_from += 1),
            Box::new(|a| a.valid_to += 1),
        ];
        for mutate in mutations {
            let mut a = base.clone();
            mutate(&mut a);
            assert!(!a.verify_under(&ca_key));
        }
    }

    #[test]
    fn store_membership_decides_self_signed_acceptance() {
        let attacker = Keypair::generate(Some(b"attacker ca"));
        let a = issue_attestation(
            &attacker,
            "Attacker CA",
            "Fake U",
            "mock://attacker/profile",
            attacker.address(),
            0,
            100,
        )
        .unwrap();

        let empty = TrustStore::new();
        assert!(!a.verify_against_store(&empty));

        let mut with_attacker = TrustStore::new();
        with_attacker
            .add(TrustAnchor {
                name: "Attacker CA".into(),
                public_key: attacker.public_key(),
            })
            .unwrap();
        assert!(a.verify_against_store(&with_attacker));
    }

    #[test]
    fn duplicate_anchor_names_are_rejected() {
        let mut store = TrustStore::new();
        let anchor = TrustAnchor {
            name: "CA".into(),
            public_key: ca().public_key(),
        };
        store.add(anchor.clone()).unwrap();
        assert!(matches!(
            store.add(anchor),
            Err(AttestationError::DuplicateAnchor(_))
        ));
    }

    #[test]
    fn store_file_round_trip() {
        let mut store = TrustStore::new();
        store
            .add(TrustAnchor {
                name: "CA".into(),
                public_key: ca().public_key(),
            })
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trust.json");
        store.save(&path).unwrap();
        assert_eq!(TrustStore::load(&path).unwrap(), store);
    }
}
