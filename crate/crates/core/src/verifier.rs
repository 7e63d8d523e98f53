//! The certificate verification state machine: every check runs in a fixed
//! order, the first failure short-circuits the rest, and the outcome is a
//! structured per-step report.
//!
//! Two verifiers share the machinery. The baseline one authenticates the
//! issuer purely against the hosted profile, which is what the forgery
//! defeats. The hardened one additionally demands a trust-anchor-signed
//! identity attestation binding the profile URL to the anchoring key.

use crate::attestation::TrustStore;
use crate::credential::{certificate_hash, BlockcertsCertificate};
use crate::hash::Digest;
use crate::ledger::{AnchorLookup, LedgerTransaction};
use crate::merkle::verify_proof;
use crate::registry::{DocumentResolver, IssuerProfileDocument, ProfileKey};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepName {
    GetTransaction,
    ComputeLocalHash,
    FetchRemoteRoot,
    CompareHashToReceipt,
    CheckMerklePath,
    CompareRootToChain,
    FetchIssuerProfile,
    ParseIssuerKeys,
    CheckRevocation,
    CheckAuthenticity,
    CheckExpiry,
}

/// The fixed execution order.
pub const STEP_ORDER: [StepName; 11] = [
    StepName::GetTransaction,
    StepName::ComputeLocalHash,
    StepName::FetchRemoteRoot,
    StepName::CompareHashToReceipt,
    StepName::CheckMerklePath,
    StepName::CompareRootToChain,
    StepName::FetchIssuerProfile,
    StepName::ParseIssuerKeys,
    StepName::CheckRevocation,
    StepName::CheckAuthenticity,
    StepName::CheckExpiry,
];

impl StepName {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepName::GetTransaction => "GetTransaction",
            StepName::ComputeLocalHash => "ComputeLocalHash",
            StepName::FetchRemoteRoot => "FetchRemoteRoot",
            StepName::CompareHashToReceipt => "CompareHashToReceipt",
            StepName::CheckMerklePath => "CheckMerklePath",
            StepName::CompareRootToChain => "CompareRootToChain",
            StepName::FetchIssuerProfile => "FetchIssuerProfile",
            StepName::ParseIssuerKeys => "ParseIssuerKeys",
            StepName::CheckRevocation => "CheckRevocation",
            StepName::CheckAuthenticity => "CheckAuthenticity",
            StepName::CheckExpiry => "CheckExpiry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationStep {
    pub name: StepName,
    pub status: StepStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub steps: Vec<VerificationStep>,
    pub verdict: Verdict,
    #[serde(rename = "checkedAt")]
    pub checked_at: i64,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    pub fn step(&self, name: StepName) -> &VerificationStep {
        self.steps
            .iter()
            .find(|s| s.name == name)
            .expect("all step names present")
    }

    /// The step the verification failed at, if any.
    pub fn failed_step(&self) -> Option<StepName> {
        self.steps
            .iter()
            .find(|s| s.status == StepStatus::Failed)
            .map(|s| s.name)
    }
}

struct StepRunner {
    steps: Vec<VerificationStep>,
    failed: bool,
}

impl StepRunner {
    fn new() -> StepRunner {
        StepRunner {
            steps: Vec::with_capacity(STEP_ORDER.len()),
            failed: bool::default(),
        }
    }

    /// Run one step unless an earlier one failed. Returns the check's
    /// product when the step passed.
    fn run<T>(
        &mut self,
        name: StepName,
        check: impl FnOnce() -> Result<(T, String), String>,
    ) -> Option<T> {
        if self.failed {
            self.steps.push(VerificationStep {
                name,
                status: StepStatus::Skipped,
                detail: "skipped after earlier failure".into(),
            });
            return None;
        }
        match check() {
            Ok((value, detail)) => {
                self.steps.push(VerificationStep {
                    name,
                    status: StepStatus::Passed,
                    detail,
                });
                Some(value)
            }
            Err(detail) => {
                self.failed = true;
                self.steps.push(VerificationStep {
                    name,
                    status: StepStatus::Failed,
                    detail,
                });
                None
            }
        }
    }

    fn finish(self, checked_at: i64) -> VerificationReport {
        let verdict = if self.failed { Verdict::Invalid } else { Verdict::Valid };
        VerificationReport {
            steps: self.steps,
            verdict,
            checked_at,
        }
    }
}

enum AuthenticityPolicy<'a> {
    /// Hosted-profile key comparison only.
    Baseline,
    /// Attestation required, verified against the trust store, plus the
    /// baseline key comparison (defense in depth).
    Attested(&'a TrustStore),
}

/// A profile key matching the transaction address that was valid at the
/// transaction time: created at or before it, not yet expired, not yet
/// revoked. Expiry and revocation boundaries are strict: a transaction at
/// the expiry instant fails.
fn key_valid_at(key: &ProfileKey, tx: &LedgerTransaction) -> bool {
    key.address == tx.from_address
        && key.created <= tx.timestamp
        && key.expires.map_or(true, |e| tx.timestamp < e)
        && key.revoked.map_or(true, |r| tx.timestamp < r)
}

fn check_profile_key(profile: &IssuerProfileDocument, tx: &LedgerTransaction) -> Result<String, String> {
    let matching: Vec<&ProfileKey> = profile
        .public_keys
        .iter()
        .filter(|k| k.address == tx.from_address)
        .collect();
    if matching.is_empty() {
        return Err(format!(
            "transaction address {} does not appear among the issuer profile keys",
            tx.from_address
        ));
    }
    if matching.iter().any(|k| key_valid_at(k, tx)) {
        Ok(format!(
            "issuer key {} matches the transaction address and was valid at the transaction time",
            tx.from_address
        ))
    } else {
        Err(format!(
            "issuer key {} matches the transaction address but was not valid at transaction time {}",
            tx.from_address, tx.timestamp
        ))
    }
}

fn check_authenticity(
    policy: &AuthenticityPolicy<'_>,
    cert: &BlockcertsCertificate,
    profile: &IssuerProfileDocument,
    tx: &LedgerTransaction,
) -> Result<String, String> {
    match policy {
        AuthenticityPolicy::Baseline => check_profile_key(profile, tx),
        AuthenticityPolicy::Attested(store) => {
            let attestation = profile
                .attestation
                .as_ref()
                .ok_or("issuer profile carries no identity attestation")?;
            if !attestation.verify_against_store(store) {
                return Err("attestation signature does not verify under any trust anchor".into());
            }
            let issuer_id = &cert.assertion.badge.issuer.issuer_id;
            if &attestation.subject_profile_url != issuer_id {
                return Err(format!(
                    "attestation binds profile url {} but the certificate issuer_id is {}",
                    attestation.subject_profile_url, issuer_id
                ));
            }
            if attestation.subject_key_address != tx.from_address {
                return Err(format!(
                    "attestation binds key address {} but the transaction was signed from {}",
                    attestation.subject_key_address, tx.from_address
                ));
            }
            if !(attestation.valid_from <= tx.timestamp && tx.timestamp < attestation.valid_to) {
                return Err(format!(
                    "transaction time {} outside attestation validity [{}, {})",
                    tx.timestamp, attestation.valid_from, attestation.valid_to
                ));
            }
            let key_detail = check_profile_key(profile, tx)?;
            Ok(format!(
                "attestation by '{}' binds {} to key {}; {}",
                attestation.issuer_ca_name, issuer_id, tx.from_address, key_detail
            ))
        }
    }
}

fn run_verification(
    cert: &BlockcertsCertificate,
    ledger: &dyn AnchorLookup,
    registry: &dyn DocumentResolver,
    now: i64,
    policy: AuthenticityPolicy<'_>,
) -> VerificationReport {
    let mut runner = StepRunner::new();
    let receipt = cert.receipt.as_ref();

    let tx = runner.run(StepName::GetTransaction, || {
        let receipt = receipt.ok_or("certificate is unsigned: no receipt attached")?;
        let tx = ledger
            .get_transaction(&receipt.transaction_id)
            .map_err(|e| e.to_string())?;
        Ok((tx, format!("transaction {} found on chain", receipt.transaction_id)))
    });

    let local_hash = runner.run(StepName::ComputeLocalHash, || {
        let digest = certificate_hash(cert).map_err(|e| e.to_string())?;
        Ok((digest, format!("local hash {digest}")))
    });

    let remote_root: Option<Digest> = runner.run(StepName::FetchRemoteRoot, || {
        let tx = tx.as_ref().expect("passed step 1");
        Ok((tx.payload, format!("anchored Merkle root {}", tx.payload)))
    });

    runner.run(StepName::CompareHashToReceipt, || {
        let receipt = receipt.expect("passed step 1");
        let local = local_hash.expect("passed step 2");
        if local == receipt.target_hash {
            Ok(((), "certificate hash matches the receipt target hash".into()))
        } else {
            Err(format!(
                "certificate hash {} does not match receipt target hash {}",
                local, receipt.target_hash
            ))
        }
    });

    runner.run(StepName::CheckMerklePath, || {
        let receipt = receipt.expect("passed step 1");
        if verify_proof(receipt) {
            let detail = if receipt.proof.is_empty() {
                "empty proof: single-certificate batch, target hash equals the Merkle root".into()
            } else {
                format!("Merkle path of {} steps folds to the receipt root", receipt.proof.len())
            };
            Ok(((), detail))
        } else {
            Err("Merkle path does not fold to the receipt root".into())
        }
    });

    runner.run(StepName::CompareRootToChain, || {
        let receipt = receipt.expect("passed step 1");
        let root = remote_root.expect("passed step 3");
        if receipt.merkle_root == root {
            Ok(((), "receipt Merkle root matches the anchored root".into()))
        } else {
            Err(format!(
                "receipt Merkle root {} does not match anchored root {}",
                receipt.merkle_root, root
            ))
        }
    });

    let issuer_id = cert.assertion.badge.issuer.issuer_id.clone();
    let profile = runner.run(StepName::FetchIssuerProfile, || {
        let profile = registry.resolve_profile(&issuer_id).map_err(|e| e.to_string())?;
        Ok((profile, format!("issuer profile fetched from {issuer_id}")))
    });

    let keys = runner.run(StepName::ParseIssuerKeys, || {
        let profile = profile.as_ref().expect("passed step 7");
        if profile.public_keys.is_empty() {
            Err("issuer profile lists no public keys".into())
        } else {
            let listing: Vec<String> = profile
                .public_keys
                .iter()
                .map(|k| k.address.to_hex())
                .collect();
            Ok((
                profile.public_keys.clone(),
                format!("issuer keys: {}", listing.join(", ")),
            ))
        }
    });
    let _ = keys;

    runner.run(StepName::CheckRevocation, || {
        let profile = profile.as_ref().expect("passed step 7");
        let list = registry
            .resolve_revocations(&profile.revocation_list)
            .map_err(|e| e.to_string())?;
        let id = &cert.assertion.id;
        if list.is_revoked(id) {
            Err(format!("assertion {id} appears in the revocation list"))
        } else {
            Ok(((), format!("assertion {id} is not revoked")))
        }
    });

    runner.run(StepName::CheckAuthenticity, || {
        let profile = profile.as_ref().expect("passed step 7");
        let tx = tx.as_ref().expect("passed step 1");
        check_authenticity(&policy, cert, profile, tx).map(|detail| ((), detail))
    });

    runner.run(StepName::CheckExpiry, || {
        match cert.assertion.expires {
            None => Ok(((), "certificate has no expiry date".into())),
            // now at the expiry instant is already expired
            Some(expires) if now < expires => {
                Ok(((), format!("certificate valid until {expires}")))
            }
            Some(expires) => Err(format!("certificate expired at {expires}, now is {now}")),
        }
    });

    runner.finish(now)
}

/// Baseline verification: the full multi-step procedure authenticating the
/// issuer against the hosted profile alone.
pub fn verify(
    cert: &BlockcertsCertificate,
    ledger: &dyn AnchorLookup,
    registry: &dyn DocumentResolver,
    now: i64,
) -> VerificationReport {
    run_verification(cert, ledger, registry, now, AuthenticityPolicy::Baseline)
}

/// Hardened verification: identical to the baseline except that issuer
/// authentication additionally requires a trust-anchor-signed attestation
/// binding the certificate's issuer_id to the anchoring key address, with
/// the transaction time inside the attestation validity window.
pub fn verify_hardened(
    cert: &BlockcertsCertificate,
    ledger: &dyn AnchorLookup,
    registry: &dyn DocumentResolver,
    trust_store: &TrustStore,
    now: i64,
) -> VerificationReport {
    run_verification(
        cert,
        ledger,
        registry,
        now,
        AuthenticityPolicy::Attested(trust_store),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Json,
}

/// Render a report either as a human-readable step panel or as the stable
/// JSON schema `{verdict, checkedAt, steps: [{name, status, detail}]}`.
pub fn render_report(report: &VerificationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("report serializes"),
        ReportFormat::Human => {
            let mut out = String::new();
            for step in &report.steps {
                let marker = match step.status {
                    StepStatus::Passed => "[PASS]",
                    StepStatus::Failed => "[FAIL]",
                    StepStatus::Skipped => "[SKIP]",
                };
                out.push_str(&format!("{marker} {:<22} {}\n", step.name.as_str(), step.detail));
            }
            let verdict = match report.verdict {
                Verdict::Valid => "VALID",
                Verdict::Invalid => "INVALID",
            };
            out.push_str(&format!("verdict: {verdict} (checked at {})\n", report.checked_at));
            out
        }
    }
}
