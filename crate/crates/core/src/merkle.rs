//! Merkle trees over batches of certificate hashes, per-certificate
//! receipts, and inclusion-proof verification.
//!
//! Internal node = SHA-256(left || right). An odd node at any level is
//! promoted unchanged to the next level, so a single-leaf batch has
//! root = leaf and an empty proof.

use crate::hash::{sha256_pair, Digest};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which side of the concatenation the sibling sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerkleProofStep {
    pub side: Side,
    #[serde(rename = "hash")]
    pub sibling_hash: Digest,
}

/// Per-certificate proof material linking a certificate to its on-chain
/// anchor: target hash, leaf-to-root sibling path, root, transaction id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerkleReceipt {
    #[serde(rename = "targetHash")]
    pub target_hash: Digest,
    pub proof: Vec<MerkleProofStep>,
    #[serde(rename = "merkleRoot")]
    pub merkle_root: Digest,
    #[serde(rename = "transactionId")]
    pub transaction_id: String,
}

#[derive(Debug, Error)]
pub enum MerkleError {
    #[error("cannot build a Merkle tree over an empty batch")]
    EmptyBatch,
}

/// Build the tree over a batch of leaf digests. Returns the root and one
/// leaf-to-root proof per leaf, in input order.
pub fn build_tree(leaves: &[Digest]) -> Result<(Digest, Vec<Vec<MerkleProofStep>>), MerkleError> {
    if leaves.is_empty() {
        return Err(MerkleError::EmptyBatch);
    }

    let mut proofs: Vec<Vec<MerkleProofStep>> = vec![Vec::new(); leaves.len()];
    // level holds (digest, indices of leaves under this node)
    let mut level: Vec<(Digest, Vec<usize>)> = leaves
        .iter()
        .enumerate()
        .map(|(i, d)| (*d, vec![i]))
        .collect();

    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut iter = level.into_iter();
        while let Some((left, left_leaves)) = iter.next() {
            match iter.next() {
                Some((right, right_leaves)) => {
                    for &i in &left_leaves {
                        proofs[i].push(MerkleProofStep {
                            side: Side::Right,
                            sibling_hash: right,
                        });
                    }
                    for &i in &right_leaves {
                        proofs[i].push(MerkleProofStep {
                            side: Side::Left,
                            sibling_hash: left,
                        });
                    }
                    let parent = sha256_pair(left.as_bytes(), right.as_bytes());
                    let mut leaves_under = left_leaves;
                    leaves_under.extend(right_leaves);
                    next.push((parent, leaves_under));
                }
                // odd node: promote unchanged
                None => next.push((left, left_leaves)),
            }
        }
        level = next;
    }

    Ok((level[0].0, proofs))
}

/// Fold the target hash through the proof path and compare with the root.
/// An empty proof means a single-certificate batch: target must equal root.
pub fn verify_proof(receipt: &MerkleReceipt) -> bool {
    let mut node = receipt.target_hash;
    for step in &receipt.proof {
        node = match step.side {
            Side::Left => sha256_pair(step.sibling_hash.as_bytes(), node.as_bytes()),
            Side::Right => sha256_pair(node.as_bytes(), step.sibling_hash.as_bytes()),
        };
    }
    node == receipt.merkle_root
}
