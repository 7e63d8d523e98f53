//! A self-contained Blockcerts-style academic-credential toolkit:
//! issuance with Merkle-batch anchoring on a simulated ledger, the full
//! multi-step verification procedure, a reproduction of the
//! issuer-impersonation forgery, and a hardened verifier backed by
//! trust-anchor-signed identity attestations.

pub mod attack;
pub mod attestation;
pub mod credential;
pub mod fixtures;
pub mod hash;
pub mod issuance;
pub mod ledger;
pub mod merkle;
pub mod registry;
pub mod verifier;

pub use attack::{forge, forge_batched, forge_with, report_differential, ForgeOptions, ForgeryScenario};
pub use attestation::{issue_attestation, IdentityAttestation, TrustAnchor, TrustStore};
pub use credential::{
    canonical_bytes, certificate_hash, validate, Assertion, BadgeClass, BlockcertsCertificate,
    DiplomaSupplement, IssuerProfileRef, RecipientProfile, Violation,
};
pub use hash::Digest;
pub use issuance::issue_batch;
pub use ledger::{
    derive_address, AnchorLookup, ChainAddress, Keypair, LedgerTransaction, SimLedger,
};
pub use merkle::{build_tree, verify_proof, MerkleProofStep, MerkleReceipt, Side};
pub use registry::{
    DocumentResolver, IssuerProfileDocument, ProfileKey, Registry, RevocationList,
};
pub use verifier::{
    render_report, verify, verify_hardened, ReportFormat, StepName, StepStatus,
    VerificationReport, Verdict,
};
