//! Shared end-to-end setup: a simulated world with a ledger, a registry,
//! one certification authority in the trust store, and honest issuers that
//! publish attested profiles.

use blockcreds::attestation::{issue_attestation, TrustAnchor, TrustStore};
use blockcreds::credential::BlockcertsCertificate;
use blockcreds::fixtures::{sample_certificate_for, IssuerIdentity};
use blockcreds::issuance::issue_batch;
use blockcreds::ledger::{Keypair, LedgerTransaction, SimLedger};
use blockcreds::registry::{IssuerProfileDocument, ProfileKey, Registry, RevocationList};

pub const T0: i64 = 1_600_000_000;

pub struct World {
    pub ledger: SimLedger,
    pub registry: Registry,
    pub trust_store: TrustStore,
    pub ca: Keypair,
}

pub struct Issuer {
    pub key: Keypair,
    pub identity: IssuerIdentity,
}

impl World {
    pub fn new() -> World {
        let ca = Keypair::generate(Some(b"accreditation authority"));
        let mut trust_store = TrustStore::new();
        trust_store
            .add(TrustAnchor {
                name: "National Accreditation CA".into(),
                public_key: ca.public_key(),
            })
            .unwrap();
        World {
            ledger: SimLedger::new(),
            registry: Registry::new(),
            trust_store,
            ca,
        }
    }

    /// Publish an honest issuer: profile with the issuer's key address, an
    /// empty revocation list, and a CA attestation covering [T0-1000, T0+1e7).
    pub fn register_issuer(&mut self, slug: &str, name: &str) -> Issuer {
        let key = Keypair::generate(Some(format!("issuer:{slug}").as_bytes()));
        let identity = IssuerIdentity::mock(slug, name);
        let attestation = issue_attestation(
            &self.ca,
            "National Accreditation CA",
            name,
            &identity.profile_url,
            key.address(),
            T0 - 1_000,
            T0 + 10_000_000,
        )
        .unwrap();
        let profile = IssuerProfileDocument {
            name: identity.name.clone(),
            url: identity.url.clone(),
            email: identity.email.clone(),
            image: None,
            public_keys: vec![ProfileKey {
                address: key.address(),
                created: T0 - 1_000,
                expires: None,
                revoked: None,
            }],
            revocation_list: identity.revocation_url.clone(),
            attestation: Some(attestation),
        };
        self.registry
            .publish_profile(&identity.profile_url, &profile)
            .unwrap();
        self.registry
            .publish_revocations(&identity.revocation_url, &RevocationList::default())
            .unwrap();
        Issuer { key, identity }
    }

    /// Honest batch issuance at transaction time T0+100.
    pub fn issue(
        &mut self,
        issuer: &Issuer,
        count: usize,
    ) -> (Vec<BlockcertsCertificate>, LedgerTransaction) {
        let certs: Vec<_> = (0..count)
            .map(|i| {
                sample_certificate_for(
                    &issuer.identity,
                    &format!("urn:assertion:{}:{i}", issuer.identity.profile_url),
                    &format!("recipient-{i}"),
                    T0,
                )
            })
            .collect();
        issue_batch(
            certs,
            &issuer.key,
            issuer.key.address(),
            &mut self.ledger,
            T0 + 100,
        )
        .unwrap()
    }
}
