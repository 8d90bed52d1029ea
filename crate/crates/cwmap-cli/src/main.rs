//! `cwmap` — train a sparse n-gram classifier, compress its weight map into
//! a key-free container, and query, evaluate, or benchmark the result.
//!
//! Exit codes: 0 success, 2 usage, 3 data (parse/validation), 4 I/O.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cwmap::map::CompressedWeightMap;
use cwmap::model::{evaluate_agreement, extract_features, Classifier, CompressedModel, SourceModel};
use cwmap::train::{read_dataset_tsv_file, train_sgd, TrainConfig};

/// Prefix of generated non-member probes. Member keys must not start with
/// this for measured false-positive rates to be exact.
const PROBE_PREFIX: &str = "np:";

#[derive(Parser)]
#[command(name = "cwmap", version, about = "Compressed weight maps for sparse linear models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Subcommand)]
enum Command {
    /// Train an n-gram classifier on a `class<TAB>utterance` TSV.
    Train(TrainArgs),
    /// Compress a model TSV into a weight-map container.
    Compress(CompressArgs),
    /// Look up keys in a container; optionally measure false positives.
    Query(QueryArgs),
    /// Predict classes for a dataset TSV.
    Predict(PredictArgs),
    /// Compare source and compressed predictions on a labeled test set.
    Eval(EvalArgs),
    /// Print the size report of a container.
    Stats(StatsArgs),
    /// Measure lookup throughput against a plain in-memory map.
    Bench(BenchArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Training set TSV: class<TAB>utterance.
    #[arg(long)]
    data: PathBuf,
    /// Output model TSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    #[arg(long, default_value_t = 0.0)]
    l1: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    max_ngram: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CompressArgs {
    /// Model TSV to compress.
    #[arg(long)]
    model: PathBuf,
    /// Output container path.
    #[arg(long)]
    out: PathBuf,
    /// Number of quantization clusters.
    #[arg(long, default_value_t = 256)]
    k: u32,
    /// False-positive budget in (0, 1]; 1 disables fingerprints.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    container: PathBuf,
    /// Keys to look up (raw bytes of the composite key).
    keys: Vec<String>,
    /// Generate this many seeded non-member probes and report the
    /// measured false-positive rate.
    #[arg(long)]
    probes: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct PredictArgs {
    /// Model TSV (always required; supplies classes and biases).
    #[arg(long)]
    model: PathBuf,
    /// Optional container; when given, weights come from it instead of
    /// the TSV.
    #[arg(long)]
    container: Option<PathBuf>,
    /// Dataset TSV; labels are ignored for prediction.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 2)]
    max_ngram: usize,
}

#[derive(Args)]
struct EvalArgs {
    /// Source model TSV.
    #[arg(long)]
    model: PathBuf,
    /// Labeled test set TSV.
    #[arg(long)]
    data: PathBuf,
    /// Compressed container; built in memory from --k/--epsilon when absent.
    #[arg(long)]
    container: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    k: u32,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    max_ngram: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    container: PathBuf,
    /// Mean key length in bytes for the n*(s+w) baseline report.
    #[arg(long)]
    avg_key_len: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    container: PathBuf,
    /// Model TSV used for the plain-map baseline and member probes.
    #[arg(long)]
    model: PathBuf,
    /// Probe count per iteration (half members, half non-members).
    #[arg(long, default_value_t = 1_000_000)]
    probes: u64,
    /// Timed repetitions; the median is reported.
    #[arg(long, default_value_t = 3)]
    iterations: usize,
    /// Reader threads over the immutable map.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

struct CliError {
    code: i32,
    msg: String,
}

impl From<cwmap::Error> for CliError {
    fn from(e: cwmap::Error) -> Self {
        let code = match e {
            cwmap::Error::Io(_) => 4,
            _ => 3,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: 4, msg: e.to_string() }
    }
}

fn usage_error(msg: impl Into<String>) -> CliError {
    CliError { code: 2, msg: msg.into() }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.msg);
        std::process::exit(e.code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Compress(args) => cmd_compress(args),
        Command::Query(args) => cmd_query(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let dataset = read_dataset_tsv_file(&args.data)?;
    let cfg = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        l1: args.l1,
        seed: args.seed,
        max_ngram: args.max_ngram,
    };
    let (model, report) = train_sgd(&dataset, &cfg)?;
    model.to_tsv_file(&args.out)?;
    let final_obj = *report.epoch_objectives.last().unwrap();
    match args.format {
        Format::Text => {
            println!("examples        {}", dataset.len());
            println!("classes         {}", model.classes().len());
            println!("parameters      {}", report.n_params);
            println!("final objective {final_obj:.6}");
            println!("lr halvings     {}", report.lr_halvings);
            println!("model written   {}", args.out.display());
        }
        Format::Kv => {
            println!("examples={}", dataset.len());
            println!("classes={}", model.classes().len());
            println!("parameters={}", report.n_params);
            println!("final_objective={final_obj:.6}");
            println!("lr_halvings={}", report.lr_halvings);
        }
    }
    Ok(())
}

fn cmd_compress(args: CompressArgs) -> Result<(), CliError> {
    let model = SourceModel::from_tsv_file(&args.model)?;
    let entries: Vec<(&Vec<u8>, f64)> =
        model.weight_entries().iter().map(|(k, &w)| (k, w)).collect();
    let map = CompressedWeightMap::build(&entries, args.k, args.epsilon)?;
    let bytes = map.save_to_file(&args.out)?;
    let stats = map.stats();
    debug_assert_eq!(bytes * 8, stats.file_bits);
    let mean_key = model.mean_key_bytes();
    match args.format {
        Format::Text => {
            print!("{}", stats.render_text(Some(mean_key)));
            println!("container written    {}", args.out.display());
        }
        Format::Kv => print!("{}", stats.render_kv(Some(mean_key))),
    }
    Ok(())
}

fn probe_keys(seed: u64, count: u64) -> impl Iterator<Item = String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| format!("{PROBE_PREFIX}{:016x}", rng.gen::<u64>()))
}

fn status_str(present: bool) -> &'static str {
    if present {
        "present-probably"
    } else {
        "absent-certain"
    }
}

fn cmd_query(args: QueryArgs) -> Result<(), CliError> {
    if args.keys.is_empty() && args.probes.is_none() {
        return Err(usage_error("nothing to do: pass keys and/or --probes"));
    }
    let map = CompressedWeightMap::load_from_file(&args.container)?;
    for key in &args.keys {
        let r = map.lookup(key.as_bytes());
        println!("{key}\t{}\t{}", r.weight, status_str(r.is_present()));
    }
    if let Some(probes) = args.probes {
        let mut hits = 0u64;
        for probe in probe_keys(args.seed, probes) {
            if map.lookup(probe.as_bytes()).is_present() {
                hits += 1;
            }
        }
        let rate = hits as f64 / probes as f64;
        match args.format {
            Format::Text => {
                println!("probes            {probes}");
                println!("false positives   {hits}");
                println!("measured fp rate  {rate:.3e}");
                println!("effective epsilon {:.3e}", map.effective_epsilon());
            }
            Format::Kv => {
                println!("probes={probes}");
                println!("false_positives={hits}");
                println!("measured_fp_rate={rate:e}");
                println!("effective_epsilon={:e}", map.effective_epsilon());
            }
        }
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let model = SourceModel::from_tsv_file(&args.model)?;
    let dataset = read_dataset_tsv_file(&args.data)?;
    let compressed = match &args.container {
        Some(path) => Some(load_compressed(&model, path)?),
        None => None,
    };
    for (_, utterance) in &dataset {
        let fv = extract_features(utterance, args.max_ngram);
        let class = match &compressed {
            Some(c) => &c.classes()[c.predict(&fv)],
            None => &model.classes()[model.predict(&fv)],
        };
        println!("{class}\t{utterance}");
    }
    Ok(())
}

fn load_compressed(model: &SourceModel, container: &Path) -> Result<CompressedModel, CliError> {
    let map = CompressedWeightMap::load_from_file(container)?;
    Ok(CompressedModel::from_parts(
        model.classes().to_vec(),
        model.biases().to_vec(),
        map,
    )?)
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let model = SourceModel::from_tsv_file(&args.model)?;
    let testset = read_dataset_tsv_file(&args.data)?;
    let compressed = match &args.container {
        Some(path) => load_compressed(&model, path)?,
        None => CompressedModel::compress(&model, args.k, args.epsilon)?,
    };
    let report = evaluate_agreement(&model, &compressed, &testset, args.max_ngram)?;
    match args.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Kv => print!("{}", report.render_kv()),
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let map = CompressedWeightMap::load_from_file(&args.container)?;
    let stats = map.stats();
    match args.format {
        Format::Text => print!("{}", stats.render_text(args.avg_key_len)),
        Format::Kv => print!("{}", stats.render_kv(args.avg_key_len)),
    }
    Ok(())
}

/// Interleaved member and non-member probe mix, deterministic per seed.
fn bench_probes(model: &SourceModel, probes: u64, seed: u64) -> Vec<Vec<u8>> {
    use rand::{Rng, SeedableRng};
    let members: Vec<&Vec<u8>> = model.weight_entries().keys().collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(probes as usize);
    for i in 0..probes {
        if i % 2 == 0 && !members.is_empty() {
            out.push(members[rng.gen_range(0..members.len())].clone());
        } else {
            out.push(format!("{PROBE_PREFIX}{:016x}", rng.gen::<u64>()).into_bytes());
        }
    }
    out
}

fn time_lookups<F: Fn(&[u8]) -> f64 + Sync>(probes: &[Vec<u8>], threads: usize, lookup: F) -> (f64, f64) {
    let threads = threads.max(1);
    let chunk = probes.len().div_ceil(threads);
    let start = Instant::now();
    let sink: f64 = std::thread::scope(|scope| {
        let handles: Vec<_> = probes
            .chunks(chunk)
            .map(|shard| scope.spawn(|| shard.iter().map(|key| lookup(key)).sum::<f64>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench thread")).sum()
    });
    let secs = start.elapsed().as_secs_f64();
    (probes.len() as f64 / secs, sink)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.probes == 0 || args.iterations == 0 {
        return Err(usage_error("--probes and --iterations must be >= 1"));
    }
    let model = SourceModel::from_tsv_file(&args.model)?;
    let map = CompressedWeightMap::load_from_file(&args.container)?;
    let plain: HashMap<&[u8], f64> =
        model.weight_entries().iter().map(|(k, &w)| (k.as_slice(), w)).collect();
    let probes = bench_probes(&model, args.probes, args.seed);

    let mut compressed_rates = Vec::with_capacity(args.iterations);
    let mut plain_rates = Vec::with_capacity(args.iterations);
    let mut sink = 0.0;
    for _ in 0..args.iterations {
        let (rate, s) = time_lookups(&probes, args.threads, |key| map.lookup(key).weight);
        compressed_rates.push(rate);
        sink += s;
        let (rate, s) =
            time_lookups(&probes, args.threads, |key| plain.get(key).copied().unwrap_or(0.0));
        plain_rates.push(rate);
        sink += s;
    }
    let compressed = median(compressed_rates);
    let baseline = median(plain_rates);
    let ratio = compressed / baseline;
    match args.format {
        Format::Text => {
            println!("probes per run      {}", args.probes);
            println!("threads             {}", args.threads);
            println!("compressed lookups  {compressed:.0}/s");
            println!("plain map lookups   {baseline:.0}/s");
            println!("ratio               {ratio:.3}");
        }
        Format::Kv => {
            println!("probes={}", args.probes);
            println!("threads={}", args.threads);
            println!("compressed_lookups_per_sec={compressed:.0}");
            println!("plain_lookups_per_sec={baseline:.0}");
            println!("ratio={ratio:.4}");
        }
    }
    // Keep the dependency on computed weights observable.
    if sink.is_nan() {
        eprintln!("bench checksum was NaN");
    }
    Ok(())
}
