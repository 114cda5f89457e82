use super::{Correction, PipelineError, Round};
use crate::docmodel::{AnnotatedDocument, PartitionManifest};
use crate::latex::ParsedDocument;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// On-disk pipeline state:
///
/// ```text
/// root/
///   partitions.json
///   parsed/<id>.json
///   annotations/<id>.json
///   reviews/<id>.base.json  <id>.log.jsonl  <id>.task.json
///   rounds/rounds.json  round-<n>/...
///   errors.json
/// ```
#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    InProgress,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewTask {
    pub doc_id: String,
    pub round: u32,
    pub status: TaskStatus,
    pub assigned_to: Option<String>,
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum LogAction {
    Claim,
    Patch { corrections: Vec<Correction> },
    Complete,
    Reopen,
}

/// One line of a document's append-only review log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub reviewer: Option<String>,
    /// Document version the action was applied to.
    pub base_version: u64,
    #[serde(flatten)]
    pub action: LogAction,
}

/// Stage 1 failure record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocFailure {
    pub doc_id: String,
    pub error: String,
}

/// Held while a process owns the workspace for writing.
#[derive(Debug)]
pub struct WorkspaceLock {
    path: PathBuf,
}

impl Drop for WorkspaceLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn file_stem(doc_id: &str) -> String {
    doc_id.replace(['/', '\\'], "_")
}

/// Writes through a temporary file and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| PipelineError::Json(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| PipelineError::Json(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes).map_err(|e| PipelineError::io(path, e))
}

impl Workspace {
    /// Creates the directory layout; existing content is kept.
    pub fn init(root: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let ws = Workspace { root: root.into() };
        for d in ["parsed", "annotations", "reviews", "rounds"] {
            let p = ws.root.join(d);
            fs::create_dir_all(&p).map_err(|e| PipelineError::io(&p, e))?;
        }
        Ok(ws)
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let ws = Workspace { root: root.into() };
        if !ws.root.join("parsed").is_dir() {
            return Err(PipelineError::NotAWorkspace(ws.root.display().to_string()));
        }
        Ok(ws)
    }

    pub fn lock(&self) -> Result<WorkspaceLock, PipelineError> {
        let path = self.root.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(WorkspaceLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(PipelineError::WorkspaceLocked(path.display().to_string())),
            Err(e) => Err(PipelineError::io(&path, e)),
        }
    }

    pub fn parsed_path(&self, doc_id: &str) -> PathBuf {
        self.root.join("parsed").join(format!("{}.json", file_stem(doc_id)))
    }

    pub fn annotation_path(&self, doc_id: &str) -> PathBuf {
        self.root.join("annotations").join(format!("{}.json", file_stem(doc_id)))
    }

    fn review_path(&self, doc_id: &str, suffix: &str) -> PathBuf {
        self.root.join("reviews").join(format!("{}.{suffix}", file_stem(doc_id)))
    }

    pub fn rounds_dir(&self) -> PathBuf {
        self.root.join("rounds")
    }

    pub fn round_dir(&self, index: u32) -> PathBuf {
        self.rounds_dir().join(format!("round-{index}"))
    }

    pub fn save_parsed(&self, doc: &ParsedDocument) -> Result<(), PipelineError> {
        write_json(&self.parsed_path(&doc.doc_id), doc)
    }

    pub fn load_parsed(&self, doc_id: &str) -> Result<ParsedDocument, PipelineError> {
        read_json(&self.parsed_path(doc_id))
    }

    pub fn has_annotation(&self, doc_id: &str) -> bool {
        self.annotation_path(doc_id).is_file()
    }

    pub fn save_annotation(&self, doc: &AnnotatedDocument) -> Result<(), PipelineError> {
        write_json(&self.annotation_path(doc.doc_id()), doc)
    }

    pub fn load_annotation(&self, doc_id: &str) -> Result<AnnotatedDocument, PipelineError> {
        let p = self.annotation_path(doc_id);
        if !p.is_file() {
            return Err(PipelineError::MissingDocument(doc_id.to_string()));
        }
        read_json(&p)
    }

    fn ids_in(&self, dir: &str) -> Vec<PathBuf> {
        let mut out: Vec<PathBuf> = fs::read_dir(self.root.join(dir))
            .into_iter()
            .flatten()
            .flatten()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        out.sort();
        out
    }

    /// Ids of all parsed documents, sorted.
    pub fn parsed_ids(&self) -> Result<Vec<String>, PipelineError> {
        let mut ids = Vec::new();
        for p in self.ids_in("parsed") {
            ids.push(read_json::<ParsedDocument>(&p)?.doc_id);
        }
        ids.sort();
        Ok(ids)
    }

    /// Every annotated document, sorted by id.
    pub fn annotations(&self) -> Result<Vec<AnnotatedDocument>, PipelineError> {
        let mut docs = Vec::new();
        for p in self.ids_in("annotations") {
            docs.push(read_json::<AnnotatedDocument>(&p)?);
        }
        docs.sort_by(|a, b| a.doc_id().cmp(b.doc_id()));
        Ok(docs)
    }

    pub fn manifest(&self) -> Result<PartitionManifest, PipelineError> {
        let p = self.root.join("partitions.json");
        if !p.is_file() {
            return Ok(PartitionManifest::default());
        }
        read_json(&p)
    }

    pub fn save_manifest(&self, m: &PartitionManifest) -> Result<(), PipelineError> {
        m.check_disjoint().map_err(PipelineError::DocModel)?;
        write_json(&self.root.join("partitions.json"), m)
    }

    pub fn rounds(&self) -> Result<Vec<Round>, PipelineError> {
        let p = self.rounds_dir().join("rounds.json");
        if !p.is_file() {
            return Ok(Vec::new());
        }
        read_json(&p)
    }

    pub(crate) fn save_rounds(&self, rounds: &[Round]) -> Result<(), PipelineError> {
        write_json(&self.rounds_dir().join("rounds.json"), &rounds)
    }

    pub fn save_failures(&self, failures: &[DocFailure]) -> Result<(), PipelineError> {
        write_json(&self.root.join("errors.json"), &failures)
    }

    pub fn failures(&self) -> Result<Vec<DocFailure>, PipelineError> {
        let p = self.root.join("errors.json");
        if !p.is_file() {
            return Ok(Vec::new());
        }
        read_json(&p)
    }

    pub fn task(&self, doc_id: &str) -> Result<Option<ReviewTask>, PipelineError> {
        let p = self.review_path(doc_id, "task.json");
        if !p.is_file() {
            return Ok(None);
        }
        read_json(&p).map(Some)
    }

    pub fn save_task(&self, task: &ReviewTask) -> Result<(), PipelineError> {
        write_json(&self.review_path(&task.doc_id, "task.json"), task)
    }

    /// All review tasks, sorted by document id.
    pub fn tasks(&self) -> Result<Vec<ReviewTask>, PipelineError> {
        let mut out = Vec::new();
        for p in self.ids_in("reviews") {
            if p.to_string_lossy().ends_with(".task.json") {
                out.push(read_json::<ReviewTask>(&p)?);
            }
        }
        out.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        Ok(out)
    }

    /// The document as it stood before review started.
    pub fn review_base(&self, doc_id: &str) -> Result<Option<AnnotatedDocument>, PipelineError> {
        let p = self.review_path(doc_id, "base.json");
        if !p.is_file() {
            return Ok(None);
        }
        read_json(&p).map(Some)
    }

    pub fn save_review_base(&self, doc: &AnnotatedDocument) -> Result<(), PipelineError> {
        write_json(&self.review_path(doc.doc_id(), "base.json"), doc)
    }

    pub fn append_log(&self, doc_id: &str, entry: &LogEntry) -> Result<(), PipelineError> {
        let p = self.review_path(doc_id, "log.jsonl");
        let mut line = serde_json::to_string(entry).map_err(|e| PipelineError::Json(e.to_string()))?;
        line.push('\n');
        let mut f = fs::OpenOptions::new().create(true).append(true).open(&p).map_err(|e| PipelineError::io(&p, e))?;
        f.write_all(line.as_bytes()).and_then(|_| f.sync_data()).map_err(|e| PipelineError::io(&p, e))
    }

    pub fn read_log(&self, doc_id: &str) -> Result<Vec<LogEntry>, PipelineError> {
        let p = self.review_path(doc_id, "log.jsonl");
        if !p.is_file() {
            return Ok(Vec::new());
        }
        let text = fs::read_to_string(&p).map_err(|e| PipelineError::io(&p, e))?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(n, l)| serde_json::from_str(l).map_err(|e| PipelineError::Json(format!("{}:{}: {e}", p.display(), n + 1))))
            .collect()
    }
}
