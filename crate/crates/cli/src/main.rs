//! `jplt`: generate datasets and queries, answer and recover offline or over
//! TCP, verify privacy of a query, and print rate tables.
//!
//! Exit codes: 0 success, 1 invalid input, 2 verification failed,
//! 3 I/O or transport error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use jplt_core::files::{
    self, DatasetFile, DemandFile, ExtensionFile, FileError, PlanFile, ZFile,
};
use jplt_core::net::{self, ClientConfig, NetError, ServerConfig, WireMessage, WireQuery};
use jplt_core::protocols::{self, Dataset, Demand, Model, Query, RecoveryPlan};
use jplt_core::rng::seeded;
use jplt_core::verify::{self, Enumeration, DEFAULT_SUBSET_CAP};
use jplt_core::{Error, PrimeField};

#[derive(Parser)]
#[command(name = "jplt", version, about = "Private linear transformation with joint privacy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a dataset of K uniform messages of length N over F_q.
    DatasetGen {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a query and its private recovery plan from a demand.
    Query {
        #[command(flatten)]
        input: QueryInput,
        #[arg(long)]
        out_query: PathBuf,
        #[arg(long)]
        out_plan: PathBuf,
    },
    /// Answer a query file against a dataset (Y = G X).
    Answer {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the demand from an answer and a plan.
    Recover {
        #[arg(long)]
        answer: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run query, answer and recover locally and check the result.
    Demo {
        #[command(flatten)]
        input: QueryInput,
        #[arg(long)]
        dataset: PathBuf,
        /// Directory for query.json, plan.json, answer.json and z.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a dataset over TCP until killed.
    Serve {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[command(flatten)]
        frame: FrameArgs,
    },
    /// Send a query file to a server and save the answer.
    Fetch {
        #[arg(long)]
        endpoint: String,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Connect and read timeout in seconds.
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        #[command(flatten)]
        frame: FrameArgs,
    },
    /// Check that a query looks the same for every candidate support.
    Verify {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
        /// Defaults to the model in the query file.
        #[arg(long)]
        model: Option<Model>,
        /// Enumerate every D-subset (the default).
        #[arg(long, conflicts_with = "sample")]
        exhaustive: bool,
        /// Check this many random D-subsets instead.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of subsets allowed in exhaustive mode.
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        cap: u128,
    },
    /// Rate table of the optimal protocol and the baselines over a D grid.
    Rates {
        #[arg(long)]
        k: usize,
        /// Ratio L/D; L = round(ratio * D) clamped to [1, D].
        #[arg(long)]
        ld: String,
        #[arg(long, default_value_t = 10)]
        d_from: usize,
        /// Defaults to K.
        #[arg(long)]
        d_to: Option<usize>,
        #[arg(long, default_value_t = 10)]
        d_step: usize,
        /// CSV path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct QueryInput {
    #[arg(long)]
    demand: PathBuf,
    /// Number of messages; defaults to the dataset's K where one is given.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed extension parameters (GRS) or M and R (augmented).
    #[arg(long)]
    extension: Option<PathBuf>,
}

#[derive(Args)]
struct FrameArgs {
    /// Maximum frame payload in bytes; defaults to PLT_MAX_FRAME or 64 MiB.
    #[arg(long)]
    max_frame: Option<usize>,
}

impl FrameArgs {
    fn max_frame(&self) -> usize {
        self.max_frame.unwrap_or_else(net::max_frame_from_env)
    }
}

enum Failure {
    Invalid(String),
    Verification(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Verification(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Verification(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<NetError> for Failure {
    fn from(e: NetError) -> Self {
        match e {
            NetError::Core(inner) => Failure::Invalid(inner.to_string()),
            other => Failure::Io(format!("{} ({})", other, other.code())),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::DatasetGen { k, n, q, seed, out } => dataset_gen(k, n, q, seed, &out),
        Command::Query { input, out_query, out_plan } => {
            let built = build_query(&input, None)?;
            files::write_query(&out_query, &WireQuery::from_query(&built.query))?;
            files::write_json(&out_plan, &PlanFile::from_plan(&built.plan, built.query.g.rows()))?;
            println!("downloaded_rows {}", built.query.downloaded_rows());
            Ok(())
        }
        Command::Answer { dataset, query, out } => {
            let ds = load_dataset(&dataset)?;
            let q = files::read_query(&query)?;
            match net::answer_wire_query(&ds, &q) {
                WireMessage::Answer(a) => Ok(files::write_answer(&out, &a)?),
                WireMessage::Error(e) => Err(Failure::Invalid(format!("{} ({})", e.message, e.code))),
                WireMessage::Query(_) => unreachable!("the server never answers with a query"),
            }
        }
        Command::Recover { answer, plan, out } => {
            let plan: PlanFile = files::read_json(&plan)?;
            let plan = plan.to_plan()?;
            let answer = files::read_answer(&answer)?.to_answer(plan.field())?;
            let z = protocols::recover(&answer, &plan)?;
            Ok(files::write_json(&out, &ZFile::from_matrix(&z))?)
        }
        Command::Demo { input, dataset, out } => demo(&input, &dataset, out.as_deref()),
        Command::Serve { dataset, listen, frame } => {
            let ds = load_dataset(&dataset)?;
            let config = ServerConfig { max_frame: frame.max_frame(), ..ServerConfig::default() };
            let server = net::Server::bind(listen.as_str(), ds, config)?;
            println!("listening on {}", server.local_addr()?);
            io::stdout().flush()?;
            server.serve()?;
            Ok(())
        }
        Command::Fetch { endpoint, query, out, timeout, frame } => {
            if !(timeout.is_finite() && timeout > 0.0) {
                return Err(Failure::Invalid("timeout must be positive".into()));
            }
            let q = files::read_query(&query)?;
            let config = ClientConfig { timeout: Duration::from_secs_f64(timeout), max_frame: frame.max_frame() };
            let answer = net::request_wire(&endpoint, &q, config)?;
            Ok(files::write_answer(&out, &answer)?)
        }
        Command::Verify { query, d, l, model, exhaustive: _, sample, seed, cap } => {
            let q = files::read_query(&query)?;
            let g = q.matrix()?;
            let mode = match sample {
                Some(count) => Enumeration::Sample { count, seed },
                None => Enumeration::Exhaustive { cap },
            };
            let report = verify::check_joint_privacy(&g, d, l, model.unwrap_or(q.model), mode)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed {
                println!("PASS ({} subsets)", report.subsets_checked);
                Ok(())
            } else {
                println!("FAIL ({} of {} subsets)", report.failures.len(), report.subsets_checked);
                Err(Failure::Verification("privacy check failed".into()))
            }
        }
        Command::Rates { k, ld, d_from, d_to, d_step, out } => {
            let ratio = verify::parse_decimal(&ld)?;
            let rows = verify::rate_table(k, &ratio, d_from, d_to.unwrap_or(k), d_step)?;
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    verify::write_rates_csv(&rows, &mut buf)?;
                    fs::write(&path, buf).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                }
                None => verify::write_rates_csv(&rows, io::stdout().lock())?,
            }
            Ok(())
        }
    }
}

fn dataset_gen(k: usize, n: usize, q: u64, seed: u64, out: &Path) -> CliResult {
    let field = PrimeField::new(q).map_err(|e| match e {
        Error::NotPrime(_) => Failure::Invalid("q must be prime".into()),
        other => other.into(),
    })?;
    let ds = Dataset::random(field, k, n, &mut seeded(seed))?;
    Ok(files::write_json(out, &DatasetFile::from_dataset(&ds))?)
}

fn load_dataset(path: &Path) -> CliResult<Dataset> {
    let file: DatasetFile = files::read_json(path)?;
    Ok(file.to_dataset()?)
}

struct BuiltQuery {
    demand: Demand,
    query: Query,
    plan: RecoveryPlan,
}

/// Dispatches on the demand's model and on whether GRS parameters or an
/// extension file were given.
fn build_query(input: &QueryInput, dataset_k: Option<usize>) -> CliResult<BuiltQuery> {
    let demand_file: DemandFile = files::read_json(&input.demand)?;
    let (demand, code) = demand_file.to_demand()?;
    let k = input
        .k
        .or(dataset_k)
        .ok_or_else(|| Failure::Invalid("--k is required".into()))?;
    if let (Some(given), Some(ds)) = (input.k, dataset_k) {
        if given != ds {
            return Err(Failure::Invalid(format!("--k {given} does not match the dataset's {ds} messages")));
        }
    }
    let extension: Option<ExtensionFile> = input.extension.as_deref().map(files::read_json).transpose()?;
    let mut rng = seeded(input.seed);
    let (query, plan) = match (demand.model(), &code, &extension) {
        (Model::I, Some(code), Some(ext)) => {
            let choice = ext.grs_choice(demand.support(), k)?;
            let out = protocols::jplt1_grs_query(demand.support(), code, k, &choice)?;
            (out.query, out.plan)
        }
        (Model::I, Some(code), None) => {
            let out = protocols::jplt1_grs_query_random(demand.support(), code, k, &mut rng)?;
            (out.query, out.plan)
        }
        (Model::I, None, None) => {
            let out = protocols::jplt1_query(&demand, k, &mut rng)?;
            (out.query, out.plan)
        }
        (Model::I, None, Some(_)) => {
            return Err(Failure::Invalid("an extension file needs grs parameters in the demand".into()))
        }
        (Model::II, _, Some(ext)) => {
            let (m, r) = ext.augmented(demand.field(), k)?;
            let out = protocols::jplt2_query_with(&demand, k, &m, &r)?;
            (out.query, out.plan)
        }
        (Model::II, _, None) => {
            let out = protocols::jplt2_query(&demand, k, &mut rng)?;
            (out.query, out.plan)
        }
    };
    Ok(BuiltQuery { demand, query, plan })
}

fn demo(input: &QueryInput, dataset: &Path, out: Option<&Path>) -> CliResult {
    let ds = load_dataset(dataset)?;
    let built = build_query(input, Some(ds.num_messages()))?;
    let wire_query = WireQuery::from_query(&built.query);
    let answer = match net::answer_wire_query(&ds, &wire_query) {
        WireMessage::Answer(a) => a,
        WireMessage::Error(e) => return Err(Failure::Invalid(format!("{} ({})", e.message, e.code))),
        WireMessage::Query(_) => unreachable!("the server never answers with a query"),
    };
    let z = protocols::recover(&answer.to_answer(ds.field())?, &built.plan)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        files::write_query(&dir.join("query.json"), &wire_query)?;
        files::write_json(&dir.join("plan.json"), &PlanFile::from_plan(&built.plan, built.query.g.rows()))?;
        files::write_answer(&dir.join("answer.json"), &answer)?;
        files::write_json(&dir.join("z.json"), &ZFile::from_matrix(&z))?;
    }
    let d = built.demand.support_size();
    let l = built.demand.dimension();
    let summary = verify::rate_summary(&built.query, d, l)?;
    let pir = verify::pir_rate(built.query.k, d, l)?;
    println!("k {} d {d} l {l} model {}", built.query.k, built.demand.model());
    println!("downloaded_rows {}", summary.downloaded_rows);
    println!("rate {}", verify::format_ratio(&summary.rate));
    println!("capacity {}", verify::format_ratio(&summary.capacity));
    println!("pir_rate {}", verify::format_ratio(&pir));
    if z == built.demand.evaluate(&ds)? {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Failure::Verification("recovered demand differs from V X_W".into()))
    }
}
