//! Simulated append-only chain: keypairs, one-way address derivation, and
//! anchoring transactions. The anchor interface is the seam a real-chain
//! client would plug into.

use crate::hash::{sha256, Digest};
use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use thiserror::Error;

/// Signature scheme recorded in every transaction encoding.
pub const SIGNATURE_SCHEME: &str = "ed25519";

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("transaction not found: {0}")]
    NotFound(String),
    #[error("duplicate transaction id: {0}")]
    DuplicateTransaction(String),
    #[error("malformed public key: {0}")]
    MalformedKey(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("persistence parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Signing keypair. Ed25519 signatures are deterministic, which keeps
/// fixture transactions byte-stable across runs.
#[derive(Clone)]
pub struct Keypair {
    signing: SigningKey,
}

impl fmt::Debug for Keypair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Keypair({})", hex::encode(self.public_key()))
    }
}

impl Keypair {
    /// With a seed: deterministic (the seed is hashed to the 32-byte scalar,
    /// so any length works). Without: cryptographically random.
    pub fn generate(seed: Option<&[u8]>) -> Keypair {
        let signing = match seed {
            Some(seed) => SigningKey::from_bytes(sha256(seed).as_bytes()),
            None => SigningKey::generate(&mut rand::rngs::OsRng),
        };
        Keypair { signing }
    }

    pub fn from_private_bytes(bytes: &[u8; 32]) -> Keypair {
        Keypair {
            signing: SigningKey::from_bytes(bytes),
        }
    }

    pub fn private_bytes(&self) -> [u8; 32] {
        self.signing.to_bytes()
    }

    pub fn public_key(&self) -> Vec<u8> {
        self.signing.verifying_key().to_bytes().to_vec()
    }

    pub fn address(&self) -> ChainAddress {
        derive_address(&self.public_key()).expect("own key is well formed")
    }

    pub fn sign(&self, message: &[u8]) -> Vec<u8> {
        self.signing.sign(message).to_bytes().to_vec()
    }
}

/// Verify a detached signature under a raw public key encoding.
pub fn verify_signature(public_key: &[u8], message: &[u8], signature: &[u8]) -> bool {
    let Ok(key_bytes) = <[u8; 32]>::try_from(public_key) else {
        return false;
    };
    let Ok(key) = VerifyingKey::from_bytes(&key_bytes) else {
        return false;
    };
    let Ok(sig) = Signature::from_slice(signature) else {
        return false;
    };
    key.verify(message, &sig).is_ok()
}

/// 20-byte chain identifier: the last 20 bytes of SHA-256(public key).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainAddress(pub [u8; 20]);

impl ChainAddress {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let bytes = hex::decode(s)?;
        let arr: [u8; 20] = bytes
            .try_into()
            .map_err(|_| hex::FromHexError::InvalidStringLength)?;
        Ok(ChainAddress(arr))
    }
}

impl fmt::Debug for ChainAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChainAddress({})", self.to_hex())
    }
}

impl fmt::Display for ChainAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for ChainAddress {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for ChainAddress {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ChainAddress::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// One-way derivation of the public chain identifier from the real key.
pub fn derive_address(public_key: &[u8]) -> Result<ChainAddress, LedgerError> {
    if public_key.len() != 32 {
        return Err(LedgerError::MalformedKey(format!(
            "expected 32 bytes, got {}",
            public_key.len()
        )));
    }
    let digest = sha256(public_key);
    let mut addr = [0u8; 20];
    addr.copy_from_slice(&digest.as_bytes()[12..]);
    Ok(ChainAddress(addr))
}

fn hex_bytes<S: serde::Serializer>(bytes: &Vec<u8>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode(bytes))
}

fn bytes_from_hex<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
    let s = String::deserialize(d)?;
    hex::decode(&s).map_err(serde::de::Error::custom)
}

/// Simulated chain entry carrying an anchored Merkle root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerTransaction {
    pub transaction_id: String,
    pub timestamp: i64,
    pub from_address: ChainAddress,
    pub to_address: ChainAddress,
    /// Merkle root of the anchored batch.
    pub payload: Digest,
    pub scheme: String,
    #[serde(serialize_with = "hex_bytes", deserialize_with = "bytes_from_hex")]
    pub signature: Vec<u8>,
    #[serde(serialize_with = "hex_bytes", deserialize_with = "bytes_from_hex")]
    pub signer_public_key: Vec<u8>,
}

impl LedgerTransaction {
    /// Signed preimage: timestamp (8 bytes big-endian) || from || to || payload.
    fn body_bytes(timestamp: i64, from: &ChainAddress, to: &ChainAddress, payload: &Digest) -> Vec<u8> {
        let mut body = Vec::with_capacity(8 + 20 + 20 + 32);
        body.extend_from_slice(&timestamp.to_be_bytes());
        body.extend_from_slice(&from.0);
        body.extend_from_slice(&to.0);
        body.extend_from_slice(payload.as_bytes());
        body
    }

    /// Signature verifies over the body and the from address binds to the
    /// signer key.
    pub fn is_well_formed(&self) -> bool {
        let Ok(derived) = derive_address(&self.signer_public_key) else {
            return false;
        };
        if derived != self.from_address {
            return false;
        }
        let body = Self::body_bytes(self.timestamp, &self.from_address, &self.to_address, &self.payload);
        verify_signature(&self.signer_public_key, &body, &self.signature)
    }
}

/// Read side of the anchor seam; all the verifier ever needs.
pub trait AnchorLookup {
    fn get_transaction(&self, transaction_id: &str) -> Result<LedgerTransaction, LedgerError>;
}

/// In-memory append-only chain with optional JSON-lines persistence.
#[derive(Debug, Default)]
pub struct SimLedger {
    transactions: Vec<LedgerTransaction>,
    by_id: HashMap<String, usize>,
}

impl SimLedger {
    pub fn new() -> SimLedger {
        SimLedger::default()
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[LedgerTransaction] {
        &self.transactions
    }

    /// Sign and append an anchoring transaction carrying the Merkle root.
    pub fn submit_anchor(
        &mut self,
        issuer: &Keypair,
        recipient_address: ChainAddress,
        merkle_root: Digest,
        timestamp: i64,
    ) -> Result<LedgerTransaction, LedgerError> {
        let from = issuer.address();
        let body = LedgerTransaction::body_bytes(timestamp, &from, &recipient_address, &merkle_root);
        let signature = issuer.sign(&body);
        let mut id_preimage = body.clone();
        id_preimage.extend_from_slice(&signature);
        let tx = LedgerTransaction {
            transaction_id: sha256(&id_preimage).to_hex(),
            timestamp,
            from_address: from,
            to_address: recipient_address,
            payload: merkle_root,
            scheme: SIGNATURE_SCHEME.to_string(),
            signature,
            signer_public_key: issuer.public_key(),
        };
        self.append(tx.clone())?;
        Ok(tx)
    }

    fn append(&mut self, tx: LedgerTransaction) -> Result<(), LedgerError> {
        if self.by_id.contains_key(&tx.transaction_id) {
            return Err(LedgerError::DuplicateTransaction(tx.transaction_id));
        }
        self.by_id.insert(tx.transaction_id.clone(), self.transactions.len());
        self.transactions.push(tx);
        Ok(())
    }

    /// JSON lines, one transaction per line.
    pub fn save(&self, path: &Path) -> Result<(), LedgerError> {
        let mut file = std::fs::File::create(path)?;
        for tx in &self.transactions {
            serde_json::to_writer(&mut file, tx)?;
            file.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SimLedger, LedgerError> {
        let mut ledger = SimLedger::new();
        if !path.exists() {
            return Ok(ledger);
        }
        let file = std::fs::File::open(path)?;
        for line in std::io::BufReader::new(file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            ledger.append(serde_json::from_str(&line)?)?;
        }
        Ok(ledger)
    }
}

impl AnchorLookup for SimLedger {
    fn get_transaction(&self, transaction_id: &str) -> Result<LedgerTransaction, LedgerError> {
        self.by_id
            .get(transaction_id)
            .map(|&i| self.transactions[i].clone())
            .ok_or_else(|| LedgerError::NotFound(transaction_id.to_string()))
    }
}
