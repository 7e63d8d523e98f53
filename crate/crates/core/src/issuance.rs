//! Batch issuance: hash every certificate, build one Merkle tree, anchor
//! the root with a single transaction, and attach a receipt to each
//! certificate.

use crate::credential::{certificate_hash, BlockcertsCertificate, CredentialError};
use crate::ledger::{ChainAddress, Keypair, LedgerError, LedgerTransaction, SimLedger};
use crate::merkle::{build_tree, MerkleError, MerkleReceipt};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IssuanceError {
    #[error("certificate {index} is invalid: {source}")]
    InvalidCertificate {
        index: usize,
        source: CredentialError,
    },
    #[error(transparent)]
    Merkle(#[from] MerkleError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Issue a batch of unsigned certificates with one anchoring transaction.
/// Validation failures abort before anything is written to the ledger.
pub fn issue_batch(
    certs: Vec<BlockcertsCertificate>,
    issuer: &Keypair,
    recipient_address: ChainAddress,
    ledger: &mut SimLedger,
    timestamp: i64,
) -> Result<(Vec<BlockcertsCertificate>, LedgerTransaction), IssuanceError> {
    let leaves = certs
        .iter()
        .enumerate()
        .map(|(index, cert)| {
            certificate_hash(cert).map_err(|source| IssuanceError::InvalidCertificate { index, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (root, proofs) = build_tree(&leaves)?;
    let tx = ledger.submit_anchor(issuer, recipient_address, root, timestamp)?;

    let mut signed = certs;
    for ((cert, leaf), proof) in signed.iter_mut().zip(&leaves).zip(proofs) {
        cert.receipt = Some(MerkleReceipt {
            target_hash: *leaf,
            proof,
            merkle_root: root,
            transaction_id: tx.transaction_id.clone(),
        });
    }
    Ok((signed, tx))
}
