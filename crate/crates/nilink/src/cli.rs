//! `nilink` subcommands.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand};
use nilink_core::annotate::create_session;
use nilink_core::corpus::build_alias_table;
use nilink_core::dataset::{
    build_dataset, dataset_stats, mask_positives, split_dataset, DatasetConfig,
};
use nilink_core::eval::{
    ablate_nil_fraction, evaluate_split, run_typing_ablation, Knowledge, NilFilter,
};
use nilink_core::model::{train, LinkerConfig, Mode};
use nilink_core::toy::{toy_benchmark, ToyConfig};
use nilink_core::typesys::{
    build_type_system, restrict_top_level, type_line, TypeAssignment, TypeSystem,
};
use nilink_core::{EntityId, KnowledgeBase};

use crate::config::{parse_floats, parse_ratios, FileConfig};
use crate::error::Error;
use crate::formats::*;
use crate::{api, checkpoint, reports, store};

#[derive(Debug, Parser)]
#[command(
    name = "nilink",
    version,
    about = "Build NIL-aware entity-linking datasets and train desk-scale linkers"
)]
pub struct Cli {
    /// TOML file of default flag values; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count hyperlink anchors per (alias, entity) in a corpus.
    BuildAlias {
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Build the type tree and entity type assignment.
    BuildTypes {
        /// `child<TAB>parent` lines.
        #[arg(long, value_name = "FILE")]
        subclass_of: PathBuf,
        /// `entity<TAB>type` lines.
        #[arg(long, value_name = "FILE")]
        instance_of: PathBuf,
        /// Collapse to the fourteen top-level types.
        #[arg(long)]
        top_level: bool,
        /// Also write `entity<TAB>A->B->C` type lines here.
        #[arg(long, value_name = "FILE")]
        lines: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Select seeds, discover mentions and filter noise into an entry file.
    MakeDataset {
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,
        /// Precomputed alias table; built from the corpus when absent.
        #[arg(long, value_name = "FILE")]
        alias_table: Option<PathBuf>,
        /// Number of seed entities to sample [default: 1000].
        #[arg(long)]
        seeds: Option<usize>,
        /// Entries sampled per mention and provenance [default: 5].
        #[arg(long)]
        max_per_provenance: Option<usize>,
        /// Random seed [default: 0].
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Turn a share of positive entries into missing-entity NIL entries.
    Mask {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Share of positives to mask [default: 0.1].
        #[arg(long)]
        mask_rate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Split entries into train, validation and test files.
    Split {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Train, validation and test ratios [default: 0.8,0.1,0.1].
        #[arg(long, value_parser = parse_ratios)]
        split: Option<[f64; 3]>,
        /// Keep all entries of a mention in the same split.
        #[arg(long)]
        group_by_mention: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Receives train.jsonl, validation.jsonl and test.jsonl.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Print dataset statistics.
    Stats {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Create a persisted annotation session.
    CreateSession {
        #[arg(long, value_name = "FILE")]
        entries: PathBuf,
        #[arg(long)]
        id: String,
        /// Exactly three comma-separated annotator ids.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        annotators: Vec<String>,
        #[arg(long)]
        expert: String,
        /// `id<TAB>title<TAB>description<TAB>url` lines for candidate cards.
        #[arg(long, value_name = "FILE")]
        entities: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        sessions_dir: PathBuf,
    },
    /// Serve the annotation API (and UI assets) over HTTP.
    Serve {
        #[arg(long, value_name = "DIR")]
        sessions_dir: PathBuf,
        /// [default: 8080]
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Built UI assets served at `/`.
        #[arg(long, value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
    /// Train a linker and write a checkpoint.
    Train {
        #[arg(long = "train", value_name = "FILE")]
        train_file: PathBuf,
        #[command(flatten)]
        knowledge: KnowledgeArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Per-epoch `epoch<TAB>mean_loss<TAB>mean_Ls<TAB>mean_Lt` log.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Evaluate a checkpoint on an entry file.
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_name = "FILE")]
        entries: PathBuf,
        #[command(flatten)]
        knowledge: KnowledgeArgs,
        /// Override the stored semantic weight.
        #[arg(long)]
        lambda: Option<f64>,
        /// Override the stored NIL threshold.
        #[arg(long)]
        threshold: Option<f64>,
        /// Row label in the report.
        #[arg(long, default_value = "linker")]
        name: String,
        /// Report file; printed to stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Retrain under reduced NIL data or without the typing loss.
    Ablate {
        #[command(subcommand)]
        kind: AblateKind,
    },
    /// Write the synthetic benchmark used by the test suite.
    Toy {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        groups: usize,
        #[arg(long, default_value_t = 600)]
        entries: usize,
        /// Receives train.jsonl, test.jsonl, entities.tsv and types.tsv.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AblateKind {
    /// NAC and OAC as the share of NIL training entries varies.
    Nil {
        #[arg(long = "train", value_name = "FILE")]
        train_file: PathBuf,
        #[arg(long, value_name = "FILE")]
        test: PathBuf,
        #[command(flatten)]
        knowledge: KnowledgeArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// [default: 0,0.25,0.5,0.75,1]
        #[arg(long)]
        fractions: Option<String>,
        /// all-nil or non-entity-phrase [default: all-nil]
        #[arg(long)]
        filter: Option<String>,
        /// `fraction<TAB>NAC<TAB>OAC` table; stdout when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// OAC at semantic-only scoring with and without the typing loss.
    Typing {
        #[arg(long = "train", value_name = "FILE")]
        train_file: PathBuf,
        #[arg(long, value_name = "FILE")]
        test: PathBuf,
        #[command(flatten)]
        knowledge: KnowledgeArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct KnowledgeArgs {
    /// Type system file from `build-types`; no typing heads when absent.
    #[arg(long, value_name = "FILE")]
    pub types: Option<PathBuf>,
    /// `id<TAB>title<TAB>description<TAB>url` lines.
    #[arg(long, value_name = "FILE")]
    pub entities: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// bi or cross [default: cross]
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Entries per minibatch [default: 4 bi, 1 cross].
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub embed_dim: Option<usize>,
    #[arg(long)]
    pub hash_vocab: Option<usize>,
    /// Weight of the semantic score [default: 0.5].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// NIL threshold [default: 0.5].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Focal loss exponent [default: 2].
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    /// Train without the typing loss.
    #[arg(long)]
    pub no_typing: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Usage problems exit with 2, pipeline failures with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_missing_input() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Failure(e)
        }
    }
}

impl From<nilink_core::Error> for CliError {
    fn from(e: nilink_core::Error) -> Self {
        CliError::Failure(e.into())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl ModelArgs {
    fn resolve(&self, file: &FileConfig) -> CliResult<LinkerConfig> {
        let mode_name = self
            .mode
            .clone()
            .or(file.mode.clone())
            .unwrap_or_else(|| "cross".into());
        let mode =
            Mode::parse(&mode_name).ok_or_else(|| usage(format!("unknown mode {mode_name:?}")))?;
        let mut c = LinkerConfig::new(mode);
        macro_rules! set {
            ($field:ident, $flag:ident, $key:ident) => {
                if let Some(v) = self.$flag.or(file.$key) {
                    c.$field = v;
                }
            };
        }
        set!(epochs, epochs, epochs);
        set!(learning_rate, learning_rate, learning_rate);
        set!(batch_size, batch_size, batch_size);
        set!(embed_dim, embed_dim, embed_dim);
        set!(hash_vocab, hash_vocab, hash_vocab);
        set!(lambda, lambda, lambda);
        set!(nil_threshold, threshold, threshold);
        set!(focal_gamma, gamma, gamma);
        set!(init_scale, init_scale, init_scale);
        set!(rng_seed, seed, seed);
        c.typing = !self.no_typing && file.typing.unwrap_or(true);
        c.validate().map_err(|e| usage(e.to_string()))?;
        Ok(c)
    }
}

struct Loaded {
    kb: KnowledgeBase,
    system: TypeSystem,
    assignment: TypeAssignment,
}

impl Loaded {
    fn knowledge(&self) -> Knowledge<'_> {
        Knowledge {
            kb: &self.kb,
            system: &self.system,
            assignment: &self.assignment,
        }
    }
}

impl KnowledgeArgs {
    fn load(&self) -> CliResult<Loaded> {
        let kb = match &self.entities {
            Some(p) => read_entities(p)?,
            None => KnowledgeBase::new(),
        };
        let (system, assignment) = match &self.types {
            Some(p) => read_type_system(p)?,
            None => (TypeSystem::empty(), TypeAssignment::new()),
        };
        Ok(Loaded {
            kb,
            system,
            assignment,
        })
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(|e| usage(e.to_string()))?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::BuildAlias { corpus, out } => {
            let parsed = read_corpus(&corpus)?;
            log::info!(
                "{} documents ({} empty, {} malformed skipped)",
                parsed.documents.len(),
                parsed.skipped_empty,
                parsed.skipped_malformed
            );
            let table = build_alias_table(&parsed.documents);
            write_atomic(&out, alias_table_to_string(&table).as_bytes())?;
            log::info!("{} aliases, {} links", table.len(), table.total_links());
        }
        Command::BuildTypes {
            subclass_of,
            instance_of,
            top_level,
            lines,
            out,
        } => {
            let sub = read_pairs(&subclass_of)?;
            let inst: Vec<(EntityId, String)> = read_pairs(&instance_of)?
                .into_iter()
                .map(|(e, t)| (EntityId::new(e), t))
                .collect();
            let (mut system, mut assignment) = build_type_system(&inst, &sub);
            if top_level {
                (system, assignment) = restrict_top_level(&system, &assignment);
            }
            write_atomic(&out, type_system_to_string(&system, &assignment).as_bytes())?;
            if let Some(path) = lines {
                let text: String = assignment
                    .iter()
                    .map(|(e, _)| format!("{e}\t{}\n", type_line(e, &system, &assignment)))
                    .collect();
                write_atomic(&path, text.as_bytes())?;
            }
            log::info!(
                "{} types, {} typed entities",
                system.len(),
                assignment.len()
            );
        }
        Command::MakeDataset {
            corpus,
            alias_table,
            seeds,
            max_per_provenance,
            seed,
            out,
        } => {
            let parsed = read_corpus(&corpus)?;
            let table = match alias_table {
                Some(p) => read_alias_table(&p)?,
                None => build_alias_table(&parsed.documents),
            };
            let config = DatasetConfig {
                seed_count: seeds.or(file.seeds).unwrap_or(1000),
                max_per_provenance: max_per_provenance.or(file.max_per_provenance).unwrap_or(5),
                seed: seed.or(file.seed).unwrap_or(0),
            };
            let build = build_dataset(&parsed.documents, &table, config);
            if build.selection.is_short(config.seed_count) {
                log::warn!(
                    "only {} entities qualify as seeds, fewer than the {} requested",
                    build.selection.survivors,
                    config.seed_count
                );
            }
            for (reason, n) in &build.discarded {
                log::info!("discarded {n} entries: {}", reason.as_str());
            }
            log::info!(
                "{} seeds, {} mentions ({} without occurrences), {} discovered, {} kept",
                build.selection.seeds.len(),
                build.discovery_mentions,
                build.mentions_without_occurrences,
                build.discovered,
                build.entries.len()
            );
            write_entries(&out, &build.entries)?;
        }
        Command::Mask {
            input,
            mask_rate,
            seed,
            out,
        } => {
            let mut entries = read_entries(&input)?;
            let rate = mask_rate.or(file.mask_rate).unwrap_or(0.1);
            let masked = mask_positives(&mut entries, rate, seed.or(file.seed).unwrap_or(0))?;
            log::info!("masked {} positive entries", masked.len());
            write_entries(&out, &entries)?;
        }
        Command::Split {
            input,
            split,
            group_by_mention,
            seed,
            out_dir,
        } => {
            let ratios = match (split, &file.split) {
                (Some(r), _) => r,
                (None, Some(s)) => parse_ratios(s).map_err(usage)?,
                (None, None) => [0.8, 0.1, 0.1],
            };
            let entries = read_entries(&input)?;
            let group = group_by_mention || file.group_by_mention.unwrap_or(false);
            let splits = split_dataset(entries, ratios, seed.or(file.seed).unwrap_or(0), group)?;
            for (name, part) in [
                ("train", &splits.train),
                ("validation", &splits.validation),
                ("test", &splits.test),
            ] {
                write_entries(&out_dir.join(format!("{name}.jsonl")), part)?;
                log::info!("{name}: {} entries", part.len());
            }
        }
        Command::Stats { input } => {
            let entries = read_entries(&input)?;
            print!("{}", reports::stats_table(&dataset_stats(&entries)));
        }
        Command::CreateSession {
            entries,
            id,
            annotators,
            expert,
            entities,
            sessions_dir,
        } => {
            let entries = read_entries(&entries)?;
            let kb = match entities {
                Some(p) => read_entities(&p)?,
                None => KnowledgeBase::new(),
            };
            let kb = kb_covering(&kb, &entries);
            let n = entries.len();
            let session = create_session(&id, entries, &annotators, &expert, kb)?;
            let mut st = store::SessionStore::open(&sessions_dir)?;
            st.create(session)?;
            log::info!("session {id}: {n} entries, {} pending tasks", 3 * n);
        }
        Command::Serve {
            sessions_dir,
            port,
            host,
            static_dir,
        } => {
            let port = port.or(file.port).unwrap_or(8080);
            serve(&sessions_dir, &host, port, static_dir)?;
        }
        Command::Train {
            train_file,
            knowledge,
            model,
            log: log_path,
            out,
        } => {
            let cfg = model.resolve(&file)?;
            let k = knowledge.load()?;
            let entries = read_entries(&train_file)?;
            let trained = train(&entries, &k.kb, &k.system, &k.assignment, &cfg)?;
            for e in &trained.log {
                log::info!(
                    "epoch {}: loss {:.4} (Ls {:.4}, Lt {:.4})",
                    e.epoch,
                    e.mean_loss,
                    e.mean_semantic,
                    e.mean_typing
                );
            }
            checkpoint::save(&out, &trained.model)?;
            if let Some(p) = log_path {
                write_atomic(&p, reports::training_log(&trained.log).as_bytes())?;
            }
        }
        Command::Eval {
            model,
            entries,
            knowledge,
            lambda,
            threshold,
            name,
            out,
        } => {
            let k = knowledge.load()?;
            let mut m = checkpoint::load(&model, &LinkerConfig::default())?;
            if m.n_types() != k.system.len() {
                return Err(usage(format!(
                    "checkpoint has {} types but the type system has {}; pass the --types file used for training",
                    m.n_types(),
                    k.system.len()
                )));
            }
            let cfg = *m.config();
            m.set_scoring(
                lambda.unwrap_or(cfg.lambda),
                threshold.unwrap_or(cfg.nil_threshold),
            );
            let cfg = *m.config();
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let entries = read_entries(&entries)?;
            let report = evaluate_split(&m, &entries, k.knowledge(), &cfg)?;
            write_or_print(out.as_deref(), &reports::accuracy_table(&name, &report))?;
            eprint!("{}", reports::eval_details(&report));
        }
        Command::Ablate { kind } => match kind {
            AblateKind::Nil {
                train_file,
                test,
                knowledge,
                model,
                fractions,
                filter,
                out,
            } => {
                let cfg = model.resolve(&file)?;
                let fractions = match fractions.or(file.fractions.clone()) {
                    Some(s) => parse_floats(&s).map_err(usage)?,
                    None => vec![0.0, 0.25, 0.5, 0.75, 1.0],
                };
                let filter_name = filter
                    .or(file.filter.clone())
                    .unwrap_or_else(|| "all-nil".into());
                let filter = NilFilter::parse(&filter_name)
                    .ok_or_else(|| usage(format!("unknown filter {filter_name:?}")))?;
                let k = knowledge.load()?;
                let train_set = read_entries(&train_file)?;
                let test_set = read_entries(&test)?;
                let curve = ablate_nil_fraction(
                    &train_set,
                    &test_set,
                    &fractions,
                    filter,
                    k.knowledge(),
                    &cfg,
                )?;
                write_or_print(out.as_deref(), &reports::ablation_curve(&curve))?;
            }
            AblateKind::Typing {
                train_file,
                test,
                knowledge,
                model,
                out,
            } => {
                let cfg = model.resolve(&file)?;
                let k = knowledge.load()?;
                if k.system.is_empty() {
                    return Err(usage("typing ablation needs --types"));
                }
                let train_set = read_entries(&train_file)?;
                let test_set = read_entries(&test)?;
                let t = run_typing_ablation(&train_set, &test_set, k.knowledge(), &cfg)?;
                write_or_print(
                    out.as_deref(),
                    &reports::typing_table(cfg.mode.as_str(), &t),
                )?;
            }
        },
        Command::Toy {
            seed,
            groups,
            entries,
            out_dir,
        } => {
            let b = toy_benchmark(&ToyConfig {
                groups,
                entries,
                seed,
                ..ToyConfig::default()
            });
            write_entries(&out_dir.join("train.jsonl"), &b.train)?;
            write_entries(&out_dir.join("test.jsonl"), &b.test)?;
            write_atomic(
                &out_dir.join("entities.tsv"),
                entities_to_string(b.kb.iter()).as_bytes(),
            )?;
            write_atomic(
                &out_dir.join("types.tsv"),
                type_system_to_string(&b.system, &b.assignment).as_bytes(),
            )?;
        }
    }
    Ok(())
}

fn serve(sessions_dir: &Path, host: &str, port: u16, static_dir: Option<PathBuf>) -> CliResult {
    let st = store::SessionStore::open(sessions_dir)?;
    log::info!(
        "{} sessions loaded from {}",
        st.ids().count(),
        sessions_dir.display()
    );
    let shared = Arc::new(Mutex::new(st));
    let app = api::app(shared.clone(), static_dir);
    let rt = tokio::runtime::Runtime::new()
        .map_err(|e| CliError::Failure(Error::io("tokio runtime", e)))?;
    rt.block_on(async {
        let addr = format!("{host}:{port}");
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| CliError::Failure(Error::io(&addr, e)))?;
        log::info!("listening on http://{addr}");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Failure(Error::io(&addr, e)))
    })?;
    let ids: Vec<String> = {
        let guard = shared.lock().expect("store lock poisoned");
        guard.ids().map(String::from).collect()
    };
    let mut guard = shared.lock().expect("store lock poisoned");
    for id in ids {
        guard.compact(&id)?;
    }
    log::info!("sessions compacted");
    Ok(())
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("NILINK_LOG", "info");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

pub fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
