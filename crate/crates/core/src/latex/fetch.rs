use super::{is_valid_arxiv_id, LatexError, SourceArchive};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const ARXIV_BASE_URL: &str = "https://arxiv.org";
const MAX_PAYLOAD: u64 = 512 * 1024 * 1024;

/// HTTP client for arXiv e-print sources with an on-disk cache laid out as
/// `<cache_dir>/<arxiv_id>/source.tar.gz` plus the extracted tree under
/// `<cache_dir>/<arxiv_id>/src/`.
#[derive(Clone)]
pub struct Fetcher {
    base_url: String,
    agent: ureq::Agent,
}

impl Default for Fetcher {
    fn default() -> Self {
        Self::new(ARXIV_BASE_URL)
    }
}

impl Fetcher {
    pub fn new(base_url: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Fetcher {
            base_url: base_url.trim_end_matches('/').to_string(),
            agent,
        }
    }

    pub fn cache_path(cache_dir: &Path, arxiv_id: &str) -> PathBuf {
        cache_dir.join(arxiv_id).join("source.tar.gz")
    }

    pub fn fetch(&self, arxiv_id: &str, cache_dir: &Path) -> Result<SourceArchive, LatexError> {
        if !is_valid_arxiv_id(arxiv_id) {
            return Err(LatexError::InvalidId(arxiv_id.to_string()));
        }
        let cached = Self::cache_path(cache_dir, arxiv_id);
        if cached.is_file() {
            let payload = fs::read(&cached)?;
            return SourceArchive::from_payload(arxiv_id, &payload);
        }
        let payload = self.download(arxiv_id)?;
        let archive = SourceArchive::from_payload(arxiv_id, &payload)?;
        let dir = cached.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        write_atomic(&cached, &payload)?;
        extract_tree(&archive, &dir.join("src"))?;
        Ok(archive)
    }

    fn download(&self, arxiv_id: &str) -> Result<Vec<u8>, LatexError> {
        let url = format!("{}/e-print/{}", self.base_url, arxiv_id);
        log::debug!("GET {url}");
        let mut resp = self
            .agent
            .get(&url)
            .call()
            .map_err(|e| LatexError::Network(e.to_string()))?;
        match resp.status().as_u16() {
            200 => {}
            404 => return Err(LatexError::NotFound(arxiv_id.to_string())),
            code => return Err(LatexError::Network(format!("HTTP {code} for {url}"))),
        }
        let is_pdf = resp
            .headers()
            .get("content-type")
            .and_then(|v| v.to_str().ok())
            .is_some_and(|v| v.contains("application/pdf"));
        if is_pdf {
            return Err(LatexError::NoSource(arxiv_id.to_string()));
        }
        resp.body_mut()
            .with_config()
            .limit(MAX_PAYLOAD)
            .read_to_vec()
            .map_err(|e| LatexError::Network(e.to_string()))
    }
}

/// Fetches through a default [`Fetcher`] pointed at arxiv.org.
pub fn fetch_source(arxiv_id: &str, cache_dir: &Path) -> Result<SourceArchive, LatexError> {
    Fetcher::default().fetch(arxiv_id, cache_dir)
}

/// Write-then-rename so concurrent fetchers of one id never observe a
/// partial file.
pub(crate) fn write_atomic(path: &Path, data: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!(
        "tmp-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn extract_tree(archive: &SourceArchive, root: &Path) -> Result<(), LatexError> {
    for (name, data) in &archive.files {
        let rel = Path::new(name);
        if rel.is_absolute() || rel.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
            log::warn!("{}: skipping unsafe path {name}", archive.arxiv_id);
            continue;
        }
        let target = root.join(rel);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(target, data)?;
    }
    Ok(())
}
