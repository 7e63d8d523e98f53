//! Command-line surface tying issuance, verification, revocation, and the
//! attack demo into reproducible file-based workflows.

use blockcreds::attack::{forge_with, report_differential, ForgeOptions};
use blockcreds::attestation::TrustStore;
use blockcreds::credential::{Assertion, BlockcertsCertificate, RecipientProfile};
use blockcreds::fixtures::IssuerIdentity;
use blockcreds::issuance::issue_batch;
use blockcreds::ledger::{ChainAddress, Keypair, SimLedger, SIGNATURE_SCHEME};
use blockcreds::registry::{Registry, RevocationList};
use blockcreds::verifier::{render_report, verify, verify_hardened, ReportFormat};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "blockcreds", about = "Blockcerts-style credential issuance, verification, and attack demo")]
struct Cli {
    /// Workspace configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Hex seed for deterministic key generation.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Clock override in epoch seconds (reproducible runs).
    #[arg(long, global = true)]
    clock: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a keypair file and print its chain address.
    Keygen {
        #[arg(long)]
        out: PathBuf,
    },
    /// Instantiate a template per recipient, anchor one Merkle batch, and
    /// write signed certificate files.
    Issue {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        recipients: PathBuf,
        #[arg(long)]
        issuer_key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a certificate and print the step report.
    Verify {
        cert: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Baseline)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
    },
    /// Add an assertion id to a revocation list file.
    Revoke {
        assertion_id: String,
        #[arg(long)]
        list: PathBuf,
        #[arg(long)]
        reason: Option<String>,
    },
    /// Run the issuer-impersonation demo and write the differential evidence.
    AttackDemo {
        #[arg(long)]
        victim: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Baseline,
    Hardened,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
}

/// Workspace layout: where the ledger, registry, and trust store live.
#[derive(Debug, Default, Serialize, Deserialize)]
struct WorkspaceConfig {
    ledger_path: Option<PathBuf>,
    registry_root: Option<PathBuf>,
    trust_store_path: Option<PathBuf>,
    clock_override: Option<i64>,
}

/// Exit codes: 0 valid/success, 1 invalid verification, 2 usage or I/O.
enum CliError {
    Invalid,
    Usage(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("parse error: {e}"))
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Serialize, Deserialize)]
struct KeypairFile {
    scheme: String,
    #[serde(rename = "privateKey")]
    private_key: String,
    #[serde(rename = "publicKey")]
    public_key: String,
    address: String,
}

fn load_config(cli: &Cli) -> Result<WorkspaceConfig, CliError> {
    match &cli.config {
        None => Ok(WorkspaceConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn now_epoch(cli: &Cli, config: &WorkspaceConfig) -> i64 {
    cli.clock.or(config.clock_override).unwrap_or_else(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .expect("clock after epoch")
            .as_secs() as i64
    })
}

fn seed_bytes(cli: &Cli) -> Result<Option<Vec<u8>>, CliError> {
    cli.seed
        .as_deref()
        .map(|s| hex::decode(s).map_err(|e| CliError::Usage(format!("invalid --seed hex: {e}"))))
        .transpose()
}

fn ledger_path(config: &WorkspaceConfig) -> Result<&Path, CliError> {
    config
        .ledger_path
        .as_deref()
        .ok_or_else(|| CliError::Usage("config is missing ledger_path".into()))
}

fn load_keypair(path: &Path) -> Result<Keypair, CliError> {
    let file: KeypairFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let bytes = hex::decode(&file.private_key).map_err(usage)?;
    let arr: [u8; 32] = bytes
        .try_into()
        .map_err(|_| CliError::Usage("private key must be 32 bytes".into()))?;
    Ok(Keypair::from_private_bytes(&arr))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn cmd_keygen(cli: &Cli, out: &Path) -> Result<(), CliError> {
    let seed = seed_bytes(cli)?;
    let keypair = Keypair::generate(seed.as_deref());
    let file = KeypairFile {
        scheme: SIGNATURE_SCHEME.to_string(),
        private_key: hex::encode(keypair.private_bytes()),
        public_key: hex::encode(keypair.public_key()),
        address: keypair.address().to_hex(),
    };
    write_json(out, &file)?;
    println!("{}", keypair.address());
    Ok(())
}

fn cmd_issue(
    cli: &Cli,
    config: &WorkspaceConfig,
    template: &Path,
    recipients: &Path,
    issuer_key: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let template: Assertion = serde_json::from_str(&std::fs::read_to_string(template)?)?;
    let recipients: Vec<RecipientProfile> =
        serde_json::from_str(&std::fs::read_to_string(recipients)?)?;
    if recipients.is_empty() {
        return Err(CliError::Usage("at least one recipient is required".into()));
    }
    let issuer = load_keypair(issuer_key)?;
    let timestamp = now_epoch(cli, config);

    let certs: Vec<BlockcertsCertificate> = recipients
        .iter()
        .map(|recipient| {
            let mut assertion = template.clone();
            assertion.id = format!("{}:{}", template.id, recipient.id);
            assertion.recipient = recipient.clone();
            BlockcertsCertificate {
                assertion,
                supplement: None,
                signature_lines: None,
                receipt: None,
            }
        })
        .collect();

    let to_address = recipients[0]
        .public_key
        .as_deref()
        .and_then(|k| ChainAddress::from_hex(k).ok())
        .unwrap_or_else(|| issuer.address());

    let ledger_file = ledger_path(config)?;
    let mut ledger = SimLedger::load(ledger_file).map_err(usage)?;
    let (signed, tx) = issue_batch(certs, &issuer, to_address, &mut ledger, timestamp)
        .map_err(usage)?;
    ledger.save(ledger_file).map_err(usage)?;

    std::fs::create_dir_all(out)?;
    for (i, cert) in signed.iter().enumerate() {
        write_json(&out.join(format!("cert-{i:03}.json")), cert)?;
    }
    println!(
        "issued {} certificate(s), anchored by transaction {}",
        signed.len(),
        tx.transaction_id
    );
    Ok(())
}

fn load_trust_store(config: &WorkspaceConfig) -> Result<TrustStore, CliError> {
    match &config.trust_store_path {
        Some(path) if path.exists() => TrustStore::load(path).map_err(usage),
        _ => Ok(TrustStore::new()),
    }
}

fn cmd_verify(
    cli: &Cli,
    config: &WorkspaceConfig,
    cert_path: &Path,
    mode: Mode,
    format: OutputFormat,
) -> Result<(), CliError> {
    let cert: BlockcertsCertificate = serde_json::from_str(&std::fs::read_to_string(cert_path)?)?;
    let ledger = SimLedger::load(ledger_path(config)?).map_err(usage)?;
    let registry = Registry::new();
    let now = now_epoch(cli, config);

    let report = match mode {
        Mode::Baseline => verify(&cert, &ledger, &registry, now),
        Mode::Hardened => {
            let store = load_trust_store(config)?;
            verify_hardened(&cert, &ledger, &registry, &store, now)
        }
    };
    let render_format = match format {
        OutputFormat::Human => ReportFormat::Human,
        OutputFormat::Json => ReportFormat::Json,
    };
    print!("{}", render_report(&report, render_format));
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Invalid)
    }
}

fn cmd_revoke(assertion_id: &str, list_path: &Path, reason: Option<&str>) -> Result<(), CliError> {
    let mut list: RevocationList = if list_path.exists() {
        serde_json::from_str(&std::fs::read_to_string(list_path)?)?
    } else {
        RevocationList::default()
    };
    list.revoke(assertion_id, reason);
    write_json(list_path, &list)?;
    println!(
        "revocation list now holds {} entr{}",
        list.revoked_assertions.len(),
        if list.revoked_assertions.len() == 1 { "y" } else { "ies" }
    );
    Ok(())
}

fn cmd_attack_demo(
    cli: &Cli,
    config: &WorkspaceConfig,
    victim_path: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let victim: IssuerIdentity = serde_json::from_str(
        &std::fs::read_to_string(victim_path)
            .map_err(|e| CliError::Usage(format!("cannot read victim fixture: {e}")))?,
    )?;
    let registry_root = config
        .registry_root
        .as_deref()
        .ok_or_else(|| CliError::Usage("config is missing registry_root".into()))?;
    let hosting_root = registry_root.join("attacker-hosting");
    let hosting_base = url::Url::from_directory_path(&{
        std::fs::create_dir_all(&hosting_root)?;
        hosting_root.canonicalize()?
    })
    .map_err(|_| CliError::Usage("registry_root must be an absolute path".into()))?
    .to_string();
    let hosting_base = hosting_base.trim_end_matches('/');

    let timestamp = now_epoch(cli, config);
    let seed = seed_bytes(cli)?;
    let seed = seed.unwrap_or_else(|| b"attack-demo-default-seed".to_vec());

    let ledger_file = ledger_path(config)?;
    let mut ledger = SimLedger::load(ledger_file).map_err(usage)?;
    let mut registry = Registry::new();

    let recipient = RecipientProfile {
        id: "forged-recipient".into(),
        kind: "email".into(),
        name: Some("Forged Recipient".into()),
        email: None,
        public_key: None,
    };
    let badge = blockcreds::fixtures::sample_badge(victim.as_ref());
    let options = ForgeOptions {
        timestamp,
        attacker_seed: Some(&seed),
        batch_size: 1,
        hosting_base,
    };
    let scenario = forge_with(&victim, &recipient, &badge, &mut registry, &mut ledger, &options)
        .map_err(usage)?;
    ledger.save(ledger_file).map_err(usage)?;

    let baseline = verify(&scenario.forged_certificate, &ledger, &registry, timestamp);
    let store = load_trust_store(config)?;
    let hardened = verify_hardened(
        &scenario.forged_certificate,
        &ledger,
        &registry,
        &store,
        timestamp,
    );
    let summary = report_differential(&scenario, &baseline, &hardened);

    std::fs::create_dir_all(out)?;
    write_json(&out.join("forged-certificate.json"), &scenario.forged_certificate)?;
    write_json(&out.join("baseline-report.json"), &baseline)?;
    write_json(&out.join("hardened-report.json"), &hardened)?;
    std::fs::write(out.join("differential.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Keygen { out } => cmd_keygen(cli, out),
        Command::Issue {
            template,
            recipients,
            issuer_key,
            out,
        } => cmd_issue(cli, &config, template, recipients, issuer_key, out),
        Command::Verify { cert, mode, format } => cmd_verify(cli, &config, cert, *mode, *format),
        Command::Revoke {
            assertion_id,
            list,
            reason,
        } => cmd_revoke(assertion_id, list, reason.as_deref()),
        Command::AttackDemo { victim, out } => cmd_attack_demo(cli, &config, victim, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(0),
        Err(CliError::Invalid) => ExitCode::from(1),
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
