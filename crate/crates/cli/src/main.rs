use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use scimine_core::docmodel::{corpus_stats, read_jsonl, write_jsonl, AnnotatedDocument, CorpusPartition, MemoryStore, PartitionManifest, PartitionName, ReviewState};
use scimine_core::eval::{evaluate, measure_speed, EvalOptions, DEFAULT_BATCH};
use scimine_core::latex::{parse_document_with_domain, DomainTag, Fetcher, SourceArchive, ARXIV_BASE_URL};
use scimine_core::llm::{ChatClient, LlmConfig, LlmTableExtractor, LlmTextExtractor};
use scimine_core::pipeline::{advance_round, annotate_document, load_gazetteers, run_stage1, train_artifacts, Stage1Options, Workspace};
use scimine_core::synth::{synth_corpus, SynthConfig};
use scimine_core::table::{HeuristicTableBackend, RemoteTableExtractor, TableConfig, TableExtractor};
use scimine_core::text::{Gazetteer, Modality, RemoteTextExtractor, TextExtractor};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "scimine", version, about = "Entity and relation extraction from LaTeX papers, with a review loop")]
struct Cli {
    /// Workspace directory.
    #[arg(short, long, global = true, default_value = ".")]
    workspace: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Create an empty workspace.
    Init,
    /// Fetch and parse arXiv sources into the workspace.
    Ingest {
        ids: Vec<String>,
        /// Parse this local .tex or .tar.gz file instead of downloading (one id only).
        #[arg(long)]
        source: Option<PathBuf>,
        #[arg(long, default_value = "other")]
        domain: DomainTag,
        /// Download cache; defaults to `<workspace>/cache`.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value = ARXIV_BASE_URL)]
        base_url: String,
    },
    /// Load annotated documents from JSONL, optionally with a partition manifest.
    Import {
        docs: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Add every imported document to this partition.
        #[arg(long)]
        partition: Option<PartitionName>,
    },
    /// Auto-annotate parsed documents and queue them for review.
    Run {
        /// Documents to annotate; all parsed documents when empty.
        ids: Vec<String>,
        #[arg(long, value_enum, default_value_t = Backend::Local)]
        backend: Backend,
        /// Round whose gazetteers the local backend uses; defaults to the latest.
        #[arg(long)]
        round: Option<u32>,
        #[arg(long)]
        text_url: Option<String>,
        #[arg(long)]
        table_url: Option<String>,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Prompt demonstrations for the llm backend.
        #[arg(long, default_value_t = 2)]
        shots: u8,
    },
    /// Prompt a chat model for entities and relations and write the predictions as JSONL.
    /// Endpoint from SCIMINE_LLM_URL, SCIMINE_LLM_KEY, SCIMINE_LLM_MODEL.
    LlmExtract {
        ids: Vec<String>,
        #[arg(long, default_value_t = 2)]
        shots: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Retrain on all gold documents outside the test partition.
    AdvanceRound,
    /// Write training exports and gazetteers for the workspace's gold documents.
    ExportTraining {
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-paper averages for each partition (or all documents).
    Stats {
        #[arg(long)]
        partition: Option<PartitionName>,
    },
    /// Score predictions against gold, both JSONL.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        per_domain: bool,
        #[arg(long)]
        errors: bool,
        /// Also time the local backends trained on the gold documents.
        #[arg(long)]
        speed: bool,
        #[arg(long, default_value_t = DEFAULT_BATCH)]
        batch: usize,
        #[arg(long)]
        json: bool,
    },
    /// Serve the review API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Bearer token; also read from SCIMINE_TOKEN.
        #[arg(long, env = "SCIMINE_TOKEN")]
        token: Option<String>,
    },
    /// Write a synthetic gold corpus and its partition manifest.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    /// Gazetteers from a training round plus the heuristic table backend.
    Local,
    /// HTTP extraction services.
    Remote,
    /// A chat model.
    Llm,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let root = cli.workspace;
    match cli.cmd {
        Cmd::Init => {
            Workspace::init(&root)?;
            println!("initialized {}", root.display());
        }
        Cmd::Ingest { ids, source, domain, cache, base_url } => ingest(&Workspace::open(&root)?, ids, source, domain, cache, &base_url)?,
        Cmd::Import { docs, manifest, partition } => import(&Workspace::open(&root)?, &docs, manifest.as_deref(), partition)?,
        Cmd::Run { ids, backend, round, text_url, table_url, workers, shots } => {
            let ws = Workspace::open(&root)?;
            let (text, table) = backends(&ws, backend, round, text_url, table_url, shots)?;
            let ids = if ids.is_empty() { ws.parsed_ids()? } else { ids };
            let round = ws.rounds()?.len() as u32;
            let opts = Stage1Options { round: round.max(1), workers, ..Default::default() };
            let report = run_stage1(&ws, &ids, text.as_ref(), table.as_ref(), &opts)?;
            println!(
                "annotated {} skipped {} failed {} findings {}",
                report.annotated.len(),
                report.skipped.len(),
                report.failures.len(),
                report.findings
            );
            for f in &report.failures {
                println!("  {}: {}", f.doc_id, f.error);
            }
        }
        Cmd::LlmExtract { ids, shots, out } => llm_extract(&Workspace::open(&root)?, ids, shots, &out)?,
        Cmd::AdvanceRound => {
            let r = advance_round(&Workspace::open(&root)?)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Cmd::ExportTraining { out } => {
            let ws = Workspace::open(&root)?;
            let gold: Vec<AnnotatedDocument> = ws.annotations()?.into_iter().filter(|d| d.review_state == ReviewState::Gold).collect();
            std::fs::create_dir_all(&out)?;
            for (name, bytes) in train_artifacts(&gold)? {
                std::fs::write(out.join(name), bytes)?;
                println!("{}", out.join(name).display());
            }
        }
        Cmd::Stats { partition } => stats(&Workspace::open(&root)?, partition)?,
        Cmd::Evaluate { gold, pred, per_domain, errors, speed, batch, json } => {
            let gold = read_docs(&gold)?;
            let pred = read_docs(&pred)?;
            let mut report = evaluate(&gold, &pred, &EvalOptions { per_domain, errors, strict_re_types: false });
            if speed {
                let text = Gazetteer::train(&gold, Modality::Text)?;
                let table = HeuristicTableBackend::new(Gazetteer::train(&gold, Modality::Table)?);
                let parsed: Vec<_> = gold.iter().map(|d| d.doc.clone()).collect();
                report.speed = Some(measure_speed(&parsed, &text, &table, &TableConfig::default(), batch)?);
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.render());
            }
        }
        Cmd::Serve { addr, token } => {
            let ws = Workspace::open(&root)?;
            if token.is_none() {
                log::warn!("no token set; the API is open to anyone who can reach {addr}");
            }
            tokio::runtime::Runtime::new()?.block_on(scimine_server::serve(ws, addr, token))?;
        }
        Cmd::Synth { out, seed } => {
            let corpus = synth_corpus(&SynthConfig { seed, ..Default::default() });
            std::fs::create_dir_all(&out)?;
            write_jsonl(BufWriter::new(File::create(out.join("gold.jsonl"))?), &corpus.docs)?;
            std::fs::write(out.join("manifest.json"), corpus.manifest.to_json())?;
            println!("{} documents in {}", corpus.docs.len(), out.display());
        }
    }
    Ok(())
}

fn read_docs(path: &Path) -> Result<Vec<AnnotatedDocument>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_jsonl(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn ingest(ws: &Workspace, ids: Vec<String>, source: Option<PathBuf>, domain: DomainTag, cache: Option<PathBuf>, base_url: &str) -> Result<()> {
    if ids.is_empty() {
        bail!("no arXiv ids given");
    }
    if source.is_some() && ids.len() != 1 {
        bail!("--source takes exactly one id");
    }
    let cache = cache.unwrap_or_else(|| ws.root.join("cache"));
    let fetcher = Fetcher::new(base_url);
    let mut failed = 0;
    for id in &ids {
        let archive = match &source {
            Some(p) => SourceArchive::from_payload(id, &std::fs::read(p).with_context(|| format!("reading {}", p.display()))?),
            None => fetcher.fetch(id, &cache),
        };
        let archive = match archive {
            Ok(a) => a,
            Err(e) => {
                eprintln!("{id}: {e}");
                failed += 1;
                continue;
            }
        };
        let out = parse_document_with_domain(&archive, domain);
        for d in &out.diagnostics {
            log::warn!("{id}: {}:{}: {}", d.file, d.offset, d.message);
        }
        ws.save_parsed(&out.document)?;
        println!("{id}: {} sentences, {} tables", out.document.sentence_count(), out.document.tables.len());
    }
    if failed > 0 {
        bail!("{failed} of {} documents failed", ids.len());
    }
    Ok(())
}

fn import(ws: &Workspace, path: &Path, manifest: Option<&Path>, partition: Option<PartitionName>) -> Result<()> {
    let docs = read_docs(path)?;
    let mut m = match manifest {
        Some(p) => PartitionManifest::from_json(&std::fs::read_to_string(p)?)?,
        None => ws.manifest()?,
    };
    for d in &docs {
        ws.save_parsed(&d.doc)?;
        ws.save_annotation(d)?;
        if let Some(name) = partition {
            m.get_mut(name).push(d.doc_id(), d.doc.domain_tag);
        }
    }
    m.check_disjoint()?;
    ws.save_manifest(&m)?;
    println!("imported {} documents", docs.len());
    Ok(())
}

fn llm_config() -> Result<LlmConfig> {
    LlmConfig::from_env().context("set SCIMINE_LLM_URL to an OpenAI-style endpoint")
}

fn backends(
    ws: &Workspace,
    backend: Backend,
    round: Option<u32>,
    text_url: Option<String>,
    table_url: Option<String>,
    shots: u8,
) -> Result<(Box<dyn TextExtractor>, Box<dyn TableExtractor>)> {
    Ok(match backend {
        Backend::Local => {
            let round = match round {
                Some(r) => r,
                None => ws.rounds()?.last().map(|r| r.index).context("no training round yet; run advance-round first")?,
            };
            let (text, table) = load_gazetteers(ws, round)?;
            (Box::new(text), Box::new(HeuristicTableBackend::new(table)))
        }
        Backend::Remote => {
            let text = text_url.context("--text-url is required")?;
            let table = table_url.context("--table-url is required")?;
            (Box::new(RemoteTextExtractor::new(&text, 4)), Box::new(RemoteTableExtractor::new(&table, 4)))
        }
        Backend::Llm => {
            let cfg = llm_config()?;
            (
                Box::new(LlmTextExtractor::new(ChatClient::new(cfg.clone()), shots)),
                Box::new(LlmTableExtractor::new(ChatClient::new(cfg), shots)),
            )
        }
    })
}

fn llm_extract(ws: &Workspace, ids: Vec<String>, shots: u8, out: &Path) -> Result<()> {
    let cfg = llm_config()?;
    let text = LlmTextExtractor::new(ChatClient::new(cfg.clone()), shots);
    let table = LlmTableExtractor::new(ChatClient::new(cfg), shots);
    let ids = if ids.is_empty() { ws.parsed_ids()? } else { ids };
    let mut docs = Vec::with_capacity(ids.len());
    for id in &ids {
        let parsed = ws.load_parsed(id)?;
        docs.push(annotate_document(&parsed, &text, &table, &TableConfig::default(), 0)?);
    }
    let issues = text.take_issues().len() + table.take_issues().len();
    write_jsonl(BufWriter::new(File::create(out)?), &docs)?;
    println!("{} documents, {issues} unparsable answer items", docs.len());
    Ok(())
}

fn stats(ws: &Workspace, partition: Option<PartitionName>) -> Result<()> {
    let docs = ws.annotations()?;
    let manifest = ws.manifest()?;
    let all = {
        let mut p = CorpusPartition::new(PartitionName::Large);
        for d in &docs {
            p.push(d.doc_id(), d.doc.domain_tag);
        }
        p
    };
    let store: MemoryStore = docs.into_iter().collect();
    let parts: Vec<(String, &CorpusPartition)> = match partition {
        Some(name) => vec![(name.to_string(), manifest.get(name).with_context(|| format!("no `{name}` partition"))?)],
        None => {
            let mut v: Vec<_> = manifest.partitions.iter().map(|(n, p)| (n.to_string(), p)).collect();
            v.push(("all".into(), &all));
            v
        }
    };
    for (name, p) in parts {
        println!("[{name}]");
        print!("{}", corpus_stats(p, &store)?);
    }
    Ok(())
}
