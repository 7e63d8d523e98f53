//! End-to-end reproduction of the issuer-impersonation forgery: publish a
//! fabricated issuer profile carrying the victim's identity fields but the
//! attacker's key, point a certificate's issuer_id at it, and anchor the
//! certificate with the attacker's own transaction.

use crate::credential::{certificate_hash, BadgeClass, BlockcertsCertificate, RecipientProfile};
use crate::fixtures::IssuerIdentity;
use crate::ledger::{Keypair, LedgerError, LedgerTransaction, SimLedger};
use crate::merkle::{build_tree, MerkleError, MerkleReceipt};
use crate::registry::{IssuerProfileDocument, ProfileKey, Registry, RegistryError, RevocationList};
use crate::verifier::{StepStatus, VerificationReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("registry error: {0}")]
    Registry(#[from] RegistryError),
    #[error("ledger error: {0}")]
    Ledger(#[from] LedgerError),
    #[error("credential error: {0}")]
    Credential(#[from] crate::credential::CredentialError),
    #[error("merkle error: {0}")]
    Merkle(#[from] MerkleError),
}

/// Everything produced by one run of the forgery.
#[derive(Debug, Clone)]
pub struct ForgeryScenario {
    pub victim_name: String,
    pub victim_real_profile_url: String,
    pub attacker_keypair: Keypair,
    pub fake_profile_url: String,
    pub forged_certificate: BlockcertsCertificate,
    pub anchor_tx: LedgerTransaction,
    /// Sibling forgeries when a batch larger than one was anchored.
    pub batch_certificates: Vec<BlockcertsCertificate>,
}

/// Knobs for a forgery run. Defaults reproduce the single-certificate
/// attack with random attacker keys and in-memory hosting.
#[derive(Debug, Clone)]
pub struct ForgeOptions<'a> {
    pub timestamp: i64,
    pub attacker_seed: Option<&'a [u8]>,
    pub batch_size: usize,
    /// Base URL of the attacker-controlled hosting.
    pub hosting_base: &'a str,
}

impl ForgeOptions<'_> {
    pub fn new(timestamp: i64) -> Self {
        ForgeOptions {
            timestamp,
            attacker_seed: None,
            batch_size: 1,
            hosting_base: "mock://attacker-hosting",
        }
    }
}

/// Forge a certificate in the victim's name, anchored as a single-leaf
/// batch. The attacker only needs what the threat model grants: its own
/// keypair, its own hosting, and the ability to transact.
pub fn forge(
    victim: &IssuerIdentity,
    recipient: &RecipientProfile,
    badge_template: &BadgeClass,
    registry: &mut Registry,
    ledger: &mut SimLedger,
    timestamp: i64,
    attacker_seed: Option<&[u8]>,
) -> Result<ForgeryScenario, AttackError> {
    let options = ForgeOptions {
        attacker_seed,
        ..ForgeOptions::new(timestamp)
    };
    forge_with(victim, recipient, badge_template, registry, ledger, &options)
}

/// Same attack with a batch of `batch_size` forged certificates anchored by
/// one transaction; the scenario's forged certificate is leaf 0.
#[allow(clippy::too_many_arguments)]
pub fn forge_batched(
    victim: &IssuerIdentity,
    recipient: &RecipientProfile,
    badge_template: &BadgeClass,
    registry: &mut Registry,
    ledger: &mut SimLedger,
    timestamp: i64,
    attacker_seed: Option<&[u8]>,
    batch_size: usize,
) -> Result<ForgeryScenario, AttackError> {
    let options = ForgeOptions {
        attacker_seed,
        batch_size,
        ..ForgeOptions::new(timestamp)
    };
    forge_with(victim, recipient, badge_template, registry, ledger, &options)
}

pub fn forge_with(
    victim: &IssuerIdentity,
    recipient: &RecipientProfile,
    badge_template: &BadgeClass,
    registry: &mut Registry,
    ledger: &mut SimLedger,
    options: &ForgeOptions<'_>,
) -> Result<ForgeryScenario, AttackError> {
    let batch_size = options.batch_size;
    let timestamp = options.timestamp;
    assert!(batch_size >= 1);
    let attacker_keypair = Keypair::generate(options.attacker_seed);

    // Attacker-controlled hosting, unrelated to the victim's real URLs.
    let fake_profile_url = format!("{}/{}/profile", options.hosting_base, slug(&victim.name));
    let fake_revocation_url =
        format!("{}/{}/revocations", options.hosting_base, slug(&victim.name));
    assert_ne!(fake_profile_url, victim.profile_url);

    // The fake profile copies the victim's visible identity verbatim; only
    // the key is the attacker's.
    let fake_profile = IssuerProfileDocument {
        name: victim.name.clone(),
        url: victim.url.clone(),
        email: victim.email.clone(),
        image: None,
        public_keys: vec![ProfileKey {
            address: attacker_keypair.address(),
            created: timestamp - 1,
            expires: None,
            revoked: None,
        }],
        revocation_list: fake_revocation_url.clone(),
        attestation: None,
    };
    registry.publish_profile(&fake_profile_url, &fake_profile)?;
    registry.publish_revocations(&fake_revocation_url, &RevocationList::default())?;

    // Certificates claiming the victim's identity but pointing issuer_id at
    // the attacker's hosting.
    let mut certs = Vec::with_capacity(batch_size);
    for i in 0..batch_size {
        let mut badge = badge_template.clone();
        badge.issuer.issuer_id = fake_profile_url.clone();
        badge.issuer.issuer_name = victim.name.clone();
        badge.issuer.issuer_url = victim.url.clone();
        badge.issuer.issuer_email = victim.email.clone();
        badge.issuer.revocation_list = fake_revocation_url.clone();

        let mut recipient = recipient.clone();
        let mut assertion_id = format!("urn:forged:{}:{}", slug(&victim.name), timestamp);
        if i > 0 {
            assertion_id.push_str(&format!(":{i}"));
            recipient.id = format!("{}-{i}", recipient.id);
        }
        let cert = BlockcertsCertificate {
            assertion: crate::credential::Assertion {
                id: assertion_id,
                kind: "Assertion".into(),
                recipient,
                badge,
                verification: crate::credential::VerificationMethod::merkle_anchor_sim(),
                issued_on: timestamp,
                expires: None,
                evidence: None,
                narrative: None,
                image: None,
                revoked: None,
                revocation_reason: None,
            },
            supplement: None,
            signature_lines: None,
            receipt: None,
        };
        certs.push(cert);
    }

    let leaves: Vec<_> = certs
        .iter()
        .map(certificate_hash)
        .collect::<Result<_, _>>()?;
    let (root, proofs) = build_tree(&leaves)?;

    let recipient_address = Keypair::generate(Some(b"attack-recipient")).address();
    let anchor_tx = ledger.submit_anchor(&attacker_keypair, recipient_address, root, timestamp)?;

    for ((cert, leaf), proof) in certs.iter_mut().zip(&leaves).zip(proofs) {
        cert.receipt = Some(MerkleReceipt {
            target_hash: *leaf,
            proof,
            merkle_root: root,
            transaction_id: anchor_tx.transaction_id.clone(),
        });
    }

    let forged_certificate = certs[0].clone();
    Ok(ForgeryScenario {
        victim_name: victim.name.clone(),
        victim_real_profile_url: victim.profile_url.clone(),
        attacker_keypair,
        fake_profile_url,
        forged_certificate,
        anchor_tx,
        batch_certificates: certs,
    })
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect()
}

/// Side-by-side step table for the same certificate under the baseline and
/// hardened verifiers, naming where they diverge.
pub fn report_differential(
    scenario: &ForgeryScenario,
    baseline: &VerificationReport,
    hardened: &VerificationReport,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Forgery against '{}' (real profile {}, fake profile {})\n",
        scenario.victim_name, scenario.victim_real_profile_url, scenario.fake_profile_url
    ));
    out.push_str(&format!(
        "{:<22} {:<10} {:<10}\n",
        "step", "baseline", "hardened"
    ));
    let status = |s: StepStatus| match s {
        StepStatus::Passed => "passed",
        StepStatus::Failed => "failed",
        StepStatus::Skipped => "skipped",
    };
    let mut diverging: Option<&'static str> = None;
    for (b, h) in baseline.steps.iter().zip(&hardened.steps) {
        let marker = if b.status != h.status {
            if diverging.is_none() {
                diverging = Some(b.name.as_str());
            }
            "  <-- diverges"
        } else {
            ""
        };
        out.push_str(&format!(
            "{:<22} {:<10} {:<10}{}\n",
            b.name.as_str(),
            status(b.status),
            status(h.status),
            marker
        ));
    }
    out.push_str(&format!(
        "baseline verdict: {:?}, hardened verdict: {:?}\n",
        baseline.verdict, hardened.verdict
    ));
    match (baseline.is_valid(), hardened.is_valid()) {
        (true, false) => out.push_str(&format!(
            "defense effective: hardened verifier rejects at {}\n",
            hardened.failed_step().map(|s| s.as_str()).unwrap_or("?")
        )),
        (true, true) => out.push_str("*** DEFENSE FAILURE: forged certificate accepted by BOTH verifiers ***\n"),
        (false, _) => out.push_str("note: baseline verifier already rejects this certificate\n"),
    }
    if let Some(step) = diverging {
        out.push_str(&format!("first diverging step: {step}\n"));
    }
    out
}
