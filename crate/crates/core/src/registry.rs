//! Publish and resolve hosted issuer profiles and revocation lists by URL.
//!
//! Resolution performs no authentication of the host or the document; any
//! publisher can claim any identity. This is the seam the impersonation
//! attack exploits.

use crate::attestation::IdentityAttestation;
use crate::ledger::ChainAddress;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::PathBuf;
use thiserror::Error;
use url::Url;

/// A public key entry in a hosted profile. The profile publishes the chain
/// address of the key, with its validity timestamps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileKey {
    pub address: ChainAddress,
    /// Epoch seconds.
    pub created: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expires: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revoked: Option<i64>,
}

/// The hosted issuer identity document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssuerProfileDocument {
    pub name: String,
    pub url: String,
    pub email: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(rename = "publicKeys")]
    pub public_keys: Vec<ProfileKey>,
    #[serde(rename = "revocationList")]
    pub revocation_list: String,
    /// Trust-anchor-signed identity binding; only the hardened verifier
    /// consumes it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attestation: Option<IdentityAttestation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevokedAssertion {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RevocationList {
    #[serde(rename = "revokedAssertions")]
    pub revoked_assertions: Vec<RevokedAssertion>,
}

impl RevocationList {
    pub fn is_revoked(&self, assertion_id: &str) -> bool {
        self.revoked_assertions.iter().any(|r| r.id == assertion_id)
    }

    /// Idempotent: revoking an already listed id leaves the list unchanged.
    pub fn revoke(&mut self, assertion_id: &str, reason: Option<&str>) {
        if !self.is_revoked(assertion_id) {
            self.revoked_assertions.push(RevokedAssertion {
                id: assertion_id.to_string(),
                reason: reason.map(str::to_string),
            });
        }
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unsupported url scheme: {0}")]
    UnsupportedScheme(String),
    #[error("invalid url {url}: {source}")]
    InvalidUrl {
        url: String,
        source: url::ParseError,
    },
    #[error("unreachable url: {0}")]
    Unreachable(String),
    #[error("document at {url} failed to parse: {source}")]
    Parse {
        url: String,
        source: serde_json::Error,
    },
    #[error("io error for {url}: {source}")]
    Io {
        url: String,
        source: std::io::Error,
    },
}

/// Resolver seam consumed by the verifiers.
pub trait DocumentResolver {
    fn resolve_profile(&self, url: &str) -> Result<IssuerProfileDocument, RegistryError>;
    fn resolve_revocations(&self, url: &str) -> Result<RevocationList, RegistryError>;
}

enum Location {
    Mock(String),
    File(PathBuf),
}

/// Content-transparent document store over `mock://` (in-memory) and
/// `file://` (filesystem) URLs. `http(s)://` is recognized as a scheme but
/// has no transport here; resolving it reports the url unreachable.
#[derive(Debug, Default)]
pub struct Registry {
    mock: HashMap<String, String>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    fn locate(url: &str) -> Result<Location, RegistryError> {
        let parsed = Url::parse(url).map_err(|source| RegistryError::InvalidUrl {
            url: url.to_string(),
            source,
        })?;
        match parsed.scheme() {
            "mock" => Ok(Location::Mock(url.to_string())),
            "file" => parsed
                .to_file_path()
                .map(Location::File)
                .map_err(|_| RegistryError::Unreachable(url.to_string())),
            "http" | "https" => Err(RegistryError::Unreachable(format!(
                "{url} (no http transport configured)"
            ))),
            other => Err(RegistryError::UnsupportedScheme(other.to_string())),
        }
    }

    fn publish_text(&mut self, url: &str, text: String) -> Result<(), RegistryError> {
        match Self::locate(url)? {
            Location::Mock(key) => {
                self.mock.insert(key, text);
                Ok(())
            }
            Location::File(path) => {
                let io_err = |source| RegistryError::Io {
                    url: url.to_string(),
                    source,
                };
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent).map_err(io_err)?;
                }
                // write-then-rename so readers never see a torn document
                let tmp = path.with_extension("tmp");
                std::fs::write(&tmp, text).map_err(io_err)?;
                std::fs::rename(&tmp, &path).map_err(io_err)?;
                Ok(())
            }
        }
    }

    fn resolve_text(&self, url: &str) -> Result<String, RegistryError> {
        match Self::locate(url)? {
            Location::Mock(key) => self
                .mock
                .get(&key)
                .cloned()
                .ok_or_else(|| RegistryError::Unreachable(url.to_string())),
            Location::File(path) => std::fs::read_to_string(&path)
                .map_err(|_| RegistryError::Unreachable(url.to_string())),
        }
    }

    fn publish_json<T: Serialize>(&mut self, url: &str, doc: &T) -> Result<(), RegistryError> {
        let text = serde_json::to_string_pretty(doc).expect("document serializes");
        self.publish_text(url, text)
    }

    /// Re-publishing overwrites the previous document.
    pub fn publish_profile(
        &mut self,
        url: &str,
        doc: &IssuerProfileDocument,
    ) -> Result<(), RegistryError> {
        self.publish_json(url, doc)
    }

    pub fn publish_revocations(
        &mut self,
        url: &str,
        list: &RevocationList,
    ) -> Result<(), RegistryError> {
        self.publish_json(url, list)
    }
}

impl DocumentResolver for Registry {
    fn resolve_profile(&self, url: &str) -> Result<IssuerProfileDocument, RegistryError> {
        let text = self.resolve_text(url)?;
        serde_json::from_str(&text).map_err(|source| RegistryError::Parse {
            url: url.to_string(),
            source,
        })
    }

    fn resolve_revocations(&self, url: &str) -> Result<RevocationList, RegistryError> {
        let text = self.resolve_text(url)?;
        serde_json::from_str(&text).map_err(|source| RegistryError::Parse {
            url: url.to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(name: &str) -> IssuerProfileDocument {
        IssuerProfileDocument {
            name: name.into(),
            url: "https://issuer.example".into(),
            email: "records@issuer.example".into(),
            image: None,
            public_keys: vec![ProfileKey {
                address: ChainAddress([7u8; 20]),
                created: 1_000,
                expires: None,
                revoked: None,
            }],
            revocation_list: "mock://issuer/revocations".into(),
            attestation: None,
        }
    }

    #[test]
    fn mock_publish_resolve_round_trip() {
        let mut reg = Registry::new();
        let p = profile("Issuer A");
        reg.publish_profile("mock://issuer/profile", &p).unwrap();
        assert_eq!(reg.resolve_profile("mock://issuer/profile").unwrap(), p);
    }

    #[test]
    fn republish_overwrites() {
        let mut reg = Registry::new();
        reg.publish_profile("mock://issuer/profile", &profile("First")).unwrap();
        reg.publish_profile("mock://issuer/profile", &profile("Second")).unwrap();
        assert_eq!(reg.resolve_profile("mock://issuer/profile").unwrap().name, "Second");
    }

    #[test]
    fn file_scheme_golden_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let url = Url::from_file_path(dir.path().join("profile.json"))
            .unwrap()
            .to_string();
        let mut reg = Registry::new();
        let p = profile("On Disk");
        reg.publish_profile(&url, &p).unwrap();
        assert_eq!(reg.resolve_profile(&url).unwrap(), p);

        let rev_url = Url::from_file_path(dir.path().join("revocations.json"))
            .unwrap()
            .to_string();
        let mut list = RevocationList::default();
        list.revoke("urn:assertion:1", Some("issued in error"));
        list.revoke("urn:assertion:2", None);
        reg.publish_revocations(&rev_url, &list).unwrap();
        assert_eq!(reg.resolve_revocations(&rev_url).unwrap(), list);
    }

    #[test]
    fn any_host_is_accepted_without_warning() {
        // An attacker-published profile at an unrelated url resolves intact.
        let mut reg = Registry::new();
        let fake = profile("Victim University");
        reg.publish_profile("mock://attacker/fake-profile", &fake).unwrap();
        assert_eq!(
            reg.resolve_profile("mock://attacker/fake-profile").unwrap(),
            fake
        );
    }

    #[test]
    fn unpublished_url_is_unreachable() {
        let reg = Registry::new();
        assert!(matches!(
            reg.resolve_profile("mock://nobody/here"),
            Err(RegistryError::Unreachable(_))
        ));
    }

    #[test]
    fn unsupported_scheme_is_rejected() {
        let mut reg = Registry::new();
        assert!(matches!(
            reg.publish_profile("ftp://x/y", &profile("X")),
            Err(RegistryError::UnsupportedScheme(_))
        ));
    }

    #[test]
    fn http_resolution_is_unreachable_without_transport() {
        let reg = Registry::new();
        assert!(matches!(
            reg.resolve_profile("https://issuer.example/profile"),
            Err(RegistryError::Unreachable(_))
        ));
    }

    #[test]
    fn revocation_membership_and_idempotence() {
        let mut list = RevocationList::default();
        list.revoke("X", None);
        list.revoke("X", None);
        assert_eq!(list.revoked_assertions.len(), 1);
        assert!(list.is_revoked("X"));
        assert!(!list.is_revoked("Y"));
    }

    #[test]
    fn empty_list_round_trip() {
        let mut reg = Registry::new();
        reg.publish_revocations("mock://issuer/revocations", &RevocationList::default())
            .unwrap();
        let list = reg.resolve_revocations("mock://issuer/revocations").unwrap();
        assert!(list.revoked_assertions.is_empty());
    }
}
