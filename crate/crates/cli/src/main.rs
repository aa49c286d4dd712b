//! `spir`: capacity analysis, retrieval planning, store generation, private
//! retrievals over in-process or TCP replicas, benchmarking, privacy audits,
//! and a replica server, all driven by one JSON catalog description.

mod config;
mod output;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use spir_core::analysis::capacity_report;
use spir_core::audit::{audit_empirical, audit_structural, AuditError, AuditReport};
use spir_core::driver::{run_bench, transcript_bytes, DriverError, RetrievalOutcome};
use spir_core::net::{serve, tcp_transports};
use spir_core::query::answer_query;
use spir_core::store::{read_store, write_store, StoreFileError};
use spir_core::wire::{encode_frame, Frame, DEFAULT_MAX_PAYLOAD};
use spir_core::{
    retrieve, retrieve_in_process, scheme1, scheme2, Catalog, MessageStore, Query, SchemeKind,
};

use config::{RunConfig, TransportSpec};
use output::{approx, emit, fraction, fraction_text, sha256_hex};

#[derive(Parser)]
#[command(name = "spir", version, about = "Private information retrieval over replicated databases")]
struct Cli {
    /// Print machine-readable JSON instead of human-readable lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact capacity, per-message rates, and the gain over classical PIR.
    Capacity(ConfigArgs),
    /// Retrieval parameters of the deterministic scheme for the catalog.
    Plan(ConfigArgs),
    /// Write a seeded random message store for the catalog.
    Gen(GenArgs),
    /// Retrieve one message privately and verify it against the store.
    Retrieve(RetrieveArgs),
    /// Sample retrievals from the priors and measure the realized rate.
    Bench(BenchArgs),
    /// Check that queries reveal nothing about which message is wanted.
    Audit(AuditArgs),
    /// Serve a store as one database replica.
    Serve(ServeArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Catalog description (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output path for the store file.
    #[arg(long)]
    store: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RetrieveArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Store file backing the databases (and ground truth for verification).
    #[arg(long)]
    store: PathBuf,
    /// Message id (or 1-based index) to retrieve.
    #[arg(long)]
    desired: String,
    /// Overrides the scheme from the config.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Run every query option of the stochastic scheme instead of sampling one.
    #[arg(long)]
    exhaustive: bool,
    /// Comma-separated replica endpoints; overrides the config transport.
    #[arg(long, value_delimiter = ',')]
    endpoints: Option<Vec<String>>,
    /// Connect/read timeout per database.
    #[arg(long, default_value_t = 30)]
    timeout_secs: u64,
    /// Largest wire frame payload in bytes; longer queries are split.
    #[arg(long, default_value_t = DEFAULT_MAX_PAYLOAD)]
    max_frame: u32,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    store: PathBuf,
    /// Overrides the trial count from the config.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// structural proves exact equality of what each database can see;
    /// empirical samples seeded retrievals and tests the distributions.
    #[arg(long, value_enum, default_value_t = ModeArg::Structural)]
    mode: ModeArg,
    /// Seeded retrievals per desired message (empirical mode).
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total-variation tolerance; defaults to a 2-sigma binomial bound.
    #[arg(long)]
    tv_threshold: Option<f64>,
    /// Chi-square significance level; defaults to 0.01.
    #[arg(long)]
    chi2_alpha: Option<f64>,
}

#[derive(Args)]
struct ServeArgs {
    /// Store file to serve.
    #[arg(long)]
    store: PathBuf,
    /// Which replica this instance plays (for logs only; replicas are equal).
    #[arg(long, default_value_t = 1)]
    db_index: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// 0 picks an ephemeral port; the chosen address is printed either way.
    #[arg(long, default_value_t = 0)]
    port: u16,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Det,
    Stoch,
}

impl SchemeArg {
    fn kind(self) -> SchemeKind {
        match self {
            SchemeArg::Det => SchemeKind::Deterministic,
            SchemeArg::Stoch => SchemeKind::Stochastic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Structural,
    Empirical,
}

enum CliError {
    Audit(String),
    Config(String),
    Divisibility(String),
    Io(String),
    Mismatch(String),
    Transport(String),
    Bind(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Audit(_) => 1,
            CliError::Config(_) => 2,
            CliError::Divisibility(_) => 3,
            CliError::Io(_) => 4,
            CliError::Mismatch(_) => 5,
            CliError::Transport(_) => 6,
            CliError::Bind(_) => 7,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Audit(m)
            | CliError::Config(m)
            | CliError::Divisibility(m)
            | CliError::Io(m)
            | CliError::Mismatch(m)
            | CliError::Transport(m)
            | CliError::Bind(m) => m,
        }
    }
}

fn driver_error(err: DriverError) -> CliError {
    match &err {
        DriverError::Deterministic(_) | DriverError::Stochastic(_) => {
            CliError::Divisibility(err.to_string())
        }
        DriverError::Transport { .. } => CliError::Transport(err.to_string()),
        DriverError::Reconstruct(_) | DriverError::Mismatch { .. } => {
            CliError::Mismatch(err.to_string())
        }
        DriverError::Store(_) => CliError::Config(err.to_string()),
    }
}

fn audit_error(err: AuditError) -> CliError {
    match &err {
        AuditError::InsufficientSamples { .. } => CliError::Config(err.to_string()),
        AuditError::Deterministic(_) | AuditError::Stochastic(_) => {
            CliError::Divisibility(err.to_string())
        }
    }
}

fn store_file_error(path: &Path, err: StoreFileError) -> CliError {
    CliError::Io(format!("store {}: {err}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPIR_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Capacity(args) => cmd_capacity(&args, cli.json),
        Command::Plan(args) => cmd_plan(&args, cli.json),
        Command::Gen(args) => cmd_gen(&args, cli.json),
        Command::Retrieve(args) => cmd_retrieve(&args, cli.json),
        Command::Bench(args) => cmd_bench(&args, cli.json),
        Command::Audit(args) => cmd_audit(&args, cli.json),
        Command::Serve(args) => cmd_serve(&args),
    }
}

fn load_config(path: &Path) -> Result<(RunConfig, Catalog), CliError> {
    config::load(path).map_err(CliError::Config)
}

fn load_store(path: &Path, catalog: &Catalog) -> Result<MessageStore, CliError> {
    let file = File::open(path).map_err(|e| store_file_error(path, e.into()))?;
    let store = read_store(&mut BufReader::new(file)).map_err(|e| store_file_error(path, e))?;
    store
        .check_catalog(catalog)
        .map_err(|e| CliError::Config(format!("store {} does not match the catalog: {e}", path.display())))?;
    Ok(store)
}

fn resolve_scheme(flag: Option<SchemeArg>, config: &RunConfig) -> Result<SchemeKind, CliError> {
    flag.map(SchemeArg::kind).or(config.scheme).ok_or_else(|| {
        CliError::Config("no scheme selected; pass --scheme det|stoch or set \"scheme\" in the config".into())
    })
}

fn resolve_desired(catalog: &Catalog, text: &str) -> Result<u16, CliError> {
    if let Some(index) = catalog.index_of_id(text) {
        return Ok(index);
    }
    if let Ok(n) = text.parse::<u16>() {
        if n >= 1 && (n as usize) <= catalog.message_count() {
            return Ok(n);
        }
    }
    let ids: Vec<&str> = catalog.messages().iter().map(|m| m.id.as_str()).collect();
    Err(CliError::Config(format!("unknown message {text:?}; catalog ids are {ids:?}")))
}

enum Transport {
    InProcess,
    Network(Vec<SocketAddr>),
}

fn resolve_transport(
    flag_endpoints: &Option<Vec<String>>,
    config: &RunConfig,
    n_databases: u16,
) -> Result<Transport, CliError> {
    let endpoints = match (flag_endpoints, &config.transport) {
        (Some(list), _) => Some(list.clone()),
        (None, Some(TransportSpec::Network { endpoints })) => Some(endpoints.clone()),
        (None, _) => None,
    };
    let Some(list) = endpoints else {
        return Ok(Transport::InProcess);
    };
    if list.len() != n_databases as usize {
        return Err(CliError::Config(format!(
            "{} endpoint(s) given but the catalog replicates over {} databases",
            list.len(),
            n_databases
        )));
    }
    let addrs = list
        .iter()
        .map(|endpoint| {
            endpoint
                .to_socket_addrs()
                .ok()
                .and_then(|mut it| it.next())
                .ok_or_else(|| CliError::Config(format!("cannot resolve endpoint {endpoint:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Transport::Network(addrs))
}

fn cmd_capacity(args: &ConfigArgs, json: bool) -> Result<(), CliError> {
    let (_, catalog) = load_config(&args.config)?;
    let report = capacity_report(&catalog);
    let messages: Vec<Value> = catalog
        .messages()
        .iter()
        .zip(&report.per_message_rates)
        .map(|(m, rate)| {
            json!({
                "id": m.id,
                "length_bits": m.length_bits,
                "prior": fraction(&m.prior),
                "rate": fraction(rate),
            })
        })
        .collect();
    let value = json!({
        "n_databases": catalog.n_databases(),
        "message_count": catalog.message_count(),
        "semantic_capacity": fraction(&report.semantic_capacity),
        "classical_capacity": fraction(&report.classical_capacity),
        "zero_pad_rate": fraction(&report.zero_pad_rate),
        "expected_download_bits": fraction(&report.expected_download),
        "gain_over_classical": report.gain,
        "gain_margin": fraction(&-report.gain_lhs.clone()),
        "messages": messages,
    });
    let mut human = vec![
        format!("semantic capacity   {}", fraction_text(&report.semantic_capacity)),
        format!("classical capacity  {}", fraction_text(&report.classical_capacity)),
        format!("zero-pad rate       {}", fraction_text(&report.zero_pad_rate)),
        format!("expected download   {} bits", fraction_text(&report.expected_download)),
        format!("beats classical     {}", if report.gain { "yes" } else { "no" }),
    ];
    for (m, rate) in catalog.messages().iter().zip(&report.per_message_rates) {
        human.push(format!("rate[{}]  {}", m.id, fraction_text(rate)));
    }
    emit(json, &value, &human);
    Ok(())
}

fn cmd_plan(args: &ConfigArgs, json: bool) -> Result<(), CliError> {
    let (_, catalog) = load_config(&args.config)?;
    let params =
        scheme1::compute_params(&catalog).map_err(|e| CliError::Divisibility(e.to_string()))?;
    let rates: Vec<Value> = (1..=catalog.message_count() as u16)
        .map(|j| fraction(&params.rate(j)))
        .collect();
    let value = json!({
        "upsilon": params.upsilon(),
        "alpha": params.alpha(),
        "subpacketizations": params.subpacketizations(),
        "d_sub": params.d_sub(),
        "download_bits": params.download_bits(),
        "rates": rates,
        "messages": catalog.messages().iter().map(|m| m.id.clone()).collect::<Vec<_>>(),
    });
    let human = vec![
        format!("upsilon            {:?}", params.upsilon()),
        format!("alpha              {}", params.alpha()),
        format!("subpacketizations  {:?}", params.subpacketizations()),
        format!("entries per db     {} per subpacket", params.d_sub()),
        format!("download           {} bits per retrieval", params.download_bits()),
    ];
    emit(json, &value, &human);
    Ok(())
}

fn cmd_gen(args: &GenArgs, json: bool) -> Result<(), CliError> {
    let (config, catalog) = load_config(&args.config.config)?;
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let store = MessageStore::random(&catalog, &mut rng);
    let file = File::create(&args.store)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.store.display())))?;
    let mut writer = BufWriter::new(file);
    write_store(&mut writer, &store).map_err(|e| store_file_error(&args.store, e))?;
    drop(writer);
    let bytes = std::fs::read(&args.store)
        .map_err(|e| CliError::Io(format!("cannot read back {}: {e}", args.store.display())))?;
    let value = json!({
        "path": args.store.display().to_string(),
        "seed": seed,
        "messages": store.message_count(),
        "bytes": bytes.len(),
        "sha256": sha256_hex(&bytes),
    });
    let human = vec![format!(
        "wrote {} ({} messages, {} bytes, seed {seed})",
        args.store.display(),
        store.message_count(),
        bytes.len()
    )];
    emit(json, &value, &human);
    Ok(())
}

fn cmd_retrieve(args: &RetrieveArgs, json: bool) -> Result<(), CliError> {
    let (config, catalog) = load_config(&args.config.config)?;
    let store = load_store(&args.store, &catalog)?;
    let scheme = resolve_scheme(args.scheme, &config)?;
    let desired = resolve_desired(&catalog, &args.desired)?;
    let seed = args.seed.or(config.seed).unwrap_or(0);

    if args.exhaustive {
        if scheme != SchemeKind::Stochastic {
            return Err(CliError::Config(
                "--exhaustive walks the option space of the stochastic scheme; pass --scheme stoch".into(),
            ));
        }
        return cmd_retrieve_exhaustive(&catalog, &store, desired, json);
    }

    let transport = resolve_transport(&args.endpoints, &config, catalog.n_databases())?;
    let network = matches!(transport, Transport::Network(_));
    let outcome = match transport {
        Transport::InProcess => {
            retrieve_in_process(&catalog, scheme, desired, seed, &store).map_err(driver_error)?
        }
        Transport::Network(addrs) => {
            let mut transports = tcp_transports(
                &addrs,
                Duration::from_secs(args.timeout_secs),
                args.max_frame,
            )
            .map_err(|e| CliError::Transport(format!("connecting: {e}")))?;
            retrieve(&catalog, scheme, desired, seed, &mut transports).map_err(driver_error)?
        }
    };
    if outcome.message != *store.message(desired) {
        return Err(CliError::Mismatch(format!(
            "retrieved copy of {:?} differs from the store",
            catalog.message(desired).id
        )));
    }

    let analytic_rate = match scheme {
        SchemeKind::Deterministic => scheme1::compute_params(&catalog)
            .map_err(|e| CliError::Divisibility(e.to_string()))?
            .rate(desired),
        SchemeKind::Stochastic => {
            BigRational::from_integer(catalog.length_bits(desired).into())
                / scheme2::expected_download(&catalog)
        }
    };
    let value = retrieve_report(&catalog, scheme, desired, seed, network, &outcome, &analytic_rate);
    let transcript = &outcome.transcript;
    let realized = BigRational::new(
        transcript.useful_bits.into(),
        transcript.downloaded_bits.into(),
    );
    let mut human = vec![
        format!(
            "retrieved {} ({} bits) downloading {} bits over {} database(s)",
            catalog.message(desired).id,
            transcript.useful_bits,
            transcript.downloaded_bits,
            catalog.n_databases()
        ),
        format!(
            "rate {} (analytic {})",
            fraction_text(&realized),
            fraction_text(&analytic_rate)
        ),
        format!("transcript sha256 {}", value["transcript_sha256"].as_str().unwrap_or_default()),
    ];
    if let Some(option) = outcome.option_index {
        human.insert(1, format!("query option {option}"));
    }
    emit(json, &value, &human);
    Ok(())
}

fn retrieve_report(
    catalog: &Catalog,
    scheme: SchemeKind,
    desired: u16,
    seed: u64,
    network: bool,
    outcome: &RetrievalOutcome,
    analytic_rate: &BigRational,
) -> Value {
    let transcript = &outcome.transcript;
    let mut upload_bits = 0u64;
    let per_database: Vec<Value> = transcript
        .queries
        .iter()
        .zip(&transcript.answers)
        .map(|(query, answer)| {
            let frame_bits = 8 * encode_frame(&Frame::Query(query.entries().to_vec())).len() as u64;
            upload_bits += frame_bits;
            json!({
                "database_index": query.database_index,
                "entries": query.entries().len(),
                "uploaded_bits": frame_bits,
                "downloaded_bits": answer.downloaded_bits(),
            })
        })
        .collect();
    let realized = BigRational::new(
        transcript.useful_bits.into(),
        transcript.downloaded_bits.into(),
    );
    json!({
        "scheme": scheme.to_string(),
        "desired_id": catalog.message(desired).id,
        "desired_index": desired,
        "seed": seed,
        "transport": if network { "network" } else { "inprocess" },
        "downloaded_bits": transcript.downloaded_bits,
        "useful_bits": transcript.useful_bits,
        "realized_rate": fraction(&realized),
        "analytic_rate": fraction(analytic_rate),
        "upload_bits": upload_bits,
        "option_index": outcome.option_index.map(|i| i.to_string()),
        "transcript_sha256": sha256_hex(&transcript_bytes(transcript)),
        "per_database": per_database,
    })
}

fn cmd_retrieve_exhaustive(
    catalog: &Catalog,
    store: &MessageStore,
    desired: u16,
    json: bool,
) -> Result<(), CliError> {
    let options = scheme2::enumerate_options(catalog, desired)
        .map_err(|e| CliError::Divisibility(e.to_string()))?;
    let mut downloads = Vec::with_capacity(options.len());
    for option in &options {
        let (queries, plan) = scheme2::build_queries_for_option(catalog, desired, option)
            .map_err(|e| CliError::Divisibility(e.to_string()))?;
        let answers = queries
            .iter()
            .map(|q| answer_query(store, q))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Mismatch(e.to_string()))?;
        let got = scheme2::reconstruct(&plan, &answers, desired)
            .map_err(|e| CliError::Mismatch(e.to_string()))?;
        if got != *store.message(desired) {
            return Err(CliError::Mismatch(format!(
                "option {} reconstructed a wrong copy of {:?}",
                scheme2::option_index(catalog, desired, option),
                catalog.message(desired).id
            )));
        }
        downloads.push(queries.iter().map(Query::answer_bits).sum::<u64>());
    }
    let total: u64 = downloads.iter().sum();
    let mean = BigRational::new(total.into(), (downloads.len() as u64).into());
    let value = json!({
        "scheme": "stochastic",
        "desired_id": catalog.message(desired).id,
        "desired_index": desired,
        "options": downloads.len(),
        "mean_download_bits": fraction(&mean),
        "min_download_bits": downloads.iter().min(),
        "max_download_bits": downloads.iter().max(),
        "verified_all_options": true,
    });
    let human = vec![format!(
        "{} options for {}: mean download {} bits (min {}, max {}), all reconstructions verified",
        downloads.len(),
        catalog.message(desired).id,
        fraction_text(&mean),
        downloads.iter().min().unwrap(),
        downloads.iter().max().unwrap(),
    )];
    emit(json, &value, &human);
    Ok(())
}

fn cmd_bench(args: &BenchArgs, json: bool) -> Result<(), CliError> {
    let (config, catalog) = load_config(&args.config.config)?;
    let store = load_store(&args.store, &catalog)?;
    let scheme = resolve_scheme(args.scheme, &config)?;
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let trials = args.trials.or(config.trials).unwrap_or(1000);
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let report = run_bench(&catalog, scheme, trials, seed, &store).map_err(driver_error)?;
    const LISTED: usize = 1000;
    let records: Vec<Value> = report
        .trial_records
        .iter()
        .take(LISTED)
        .map(|r| {
            json!({
                "desired_index": r.desired_index,
                "desired_id": catalog.message(r.desired_index).id,
                "downloaded_bits": r.downloaded_bits,
                "option_index": r.option_index.map(|i| i.to_string()),
            })
        })
        .collect();
    let value = json!({
        "scheme": scheme.to_string(),
        "trials": report.trials,
        "seed": seed,
        "empirical_rate": fraction(&report.empirical_rate),
        "analytic_capacity": fraction(&report.analytic_capacity),
        "total_useful_bits": report.total_useful_bits,
        "total_downloaded_bits": report.total_downloaded_bits,
        "desired_counts": report.desired_counts,
        "trial_records": records,
        "trial_records_truncated": report.trial_records.len() > LISTED,
    });
    let human = vec![
        format!(
            "{} trials ({} scheme): {} useful bits over {} downloaded",
            report.trials, scheme, report.total_useful_bits, report.total_downloaded_bits
        ),
        format!(
            "empirical rate {} ≈ {:.6}",
            fraction_text(&report.empirical_rate),
            approx(&report.empirical_rate)
        ),
        format!(
            "capacity       {} ≈ {:.6}",
            fraction_text(&report.analytic_capacity),
            approx(&report.analytic_capacity)
        ),
    ];
    emit(json, &value, &human);
    Ok(())
}

fn cmd_audit(args: &AuditArgs, json: bool) -> Result<(), CliError> {
    let (config, catalog) = load_config(&args.config.config)?;
    let scheme = resolve_scheme(args.scheme, &config)?;
    let report = match args.mode {
        ModeArg::Structural => audit_structural(&catalog, scheme),
        ModeArg::Empirical => audit_empirical(
            &catalog,
            scheme,
            args.samples,
            args.seed,
            args.tv_threshold,
            args.chi2_alpha,
        ),
    }
    .map_err(audit_error)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    emit(json, &value, &audit_lines(&report));
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Audit(
            "what the databases see depends on the desired message; see the report above".into(),
        ))
    }
}

fn audit_lines(report: &AuditReport) -> Vec<String> {
    let mut lines = vec![format!(
        "{:?} audit of the {} scheme: {}",
        report.mode,
        report.scheme,
        if report.pass { "pass" } else { "FAIL" }
    )];
    for db in &report.databases {
        let tv = db
            .max_total_variation
            .map(|v| format!(" (max TV {v:.5})"))
            .unwrap_or_default();
        lines.push(format!(
            "database {}: {}{tv}",
            db.database_index,
            if db.indistinguishable { "indistinguishable" } else { "DISTINGUISHABLE" },
        ));
    }
    for stat in &report.statistics {
        lines.push(format!(
            "{}: statistic {:.3}, critical {:.3} at {} dof: {}",
            stat.name,
            stat.statistic,
            stat.critical_value,
            stat.degrees_of_freedom,
            if stat.rejected { "REJECTED" } else { "not rejected" },
        ));
    }
    lines
}

fn cmd_serve(args: &ServeArgs) -> Result<(), CliError> {
    let file = File::open(&args.store).map_err(|e| store_file_error(&args.store, e.into()))?;
    let store =
        read_store(&mut BufReader::new(file)).map_err(|e| store_file_error(&args.store, e))?;
    let listener = TcpListener::bind((args.host.as_str(), args.port))
        .map_err(|e| CliError::Bind(format!("cannot bind {}:{}: {e}", args.host, args.port)))?;
    let addr = listener
        .local_addr()
        .map_err(|e| CliError::Bind(e.to_string()))?;
    println!("listening on {addr}");
    log::info!(
        "database {} serving {} messages ({} bits) on {addr}",
        args.db_index,
        store.message_count(),
        store.total_bits()
    );
    serve(listener, Arc::new(store)).map_err(|e| CliError::Io(e.to_string()))
}
