//! Fetching against a local stand-in for the arXiv e-print endpoint.

use flate2::write::GzEncoder;
use flate2::Compression;
use scimine_core::latex::{parse_document, Fetcher, LatexError};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

const BERT_MAIN: &str = r"\documentclass{article}
\begin{document}
\section{Experiments}
We fine-tune on GLUE.
\input{glue}
\end{document}
";

const BERT_GLUE: &str = r"\begin{table*}[t]
\begin{center}
\begin{tabular}{lcccccccccc}
\hline
System & MNLI-(m/mm) & QQP & QNLI & SST-2 & CoLA & STS-B & MRPC & RTE & Average \\
 & 392k & 363k & 108k & 67k & 8.5k & 5.7k & 3.5k & 2.5k & - \\
\hline
BiLSTM+ELMo+Attn & 76.4/76.1 & 64.8 & 79.8 & 90.4 & 36.0 & 73.3 & 84.9 & 56.8 & 71.0 \\
BERT$_{\rm LARGE}$ & 86.7/85.9 & 72.1 & 92.7 & 94.9 & 60.5 & 86.5 & 89.3 & 70.1 & 82.1 \\
\hline
\end{tabular}
\end{center}
\caption{GLUE Test results.}
\end{table*}
";

fn tarball() -> Vec<u8> {
    let mut builder = tar::Builder::new(GzEncoder::new(Vec::new(), Compression::default()));
    for (name, body) in [("bert.tex", BERT_MAIN), ("glue.tex", BERT_GLUE)] {
        let mut header = tar::Header::new_gnu();
        header.set_size(body.len() as u64);
        header.set_mode(0o644);
        header.set_cksum();
        builder.append_data(&mut header, name, body.as_bytes()).unwrap();
    }
    builder.into_inner().unwrap().finish().unwrap()
}

struct Server {
    url: String,
    hits: Arc<AtomicUsize>,
}

fn serve() -> Server {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}", server.server_addr().to_ip().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    let payload = tarball();
    thread::spawn(move || {
        for req in server.incoming_requests() {
            counter.fetch_add(1, Ordering::SeqCst);
            let resp = match req.url() {
                "/e-print/1810.04805" => tiny_http::Response::from_data(payload.clone())
                    .with_header("Content-Type: application/x-eprint-tar".parse::<tiny_http::Header>().unwrap()),
                "/e-print/2001.00002" => tiny_http::Response::from_data(b"%PDF-1.5 ...".to_vec())
                    .with_header("Content-Type: application/pdf".parse::<tiny_http::Header>().unwrap()),
                _ => tiny_http::Response::from_data(b"not found".to_vec()).with_status_code(404),
            };
            let _ = req.respond(resp);
        }
    });
    Server { url, hits }
}

#[test]
fn fetch_parse_and_cache() {
    let srv = serve();
    let cache = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(&srv.url);

    let archive = fetcher.fetch("1810.04805", cache.path()).unwrap();
    assert_eq!(archive.main_tex, "bert.tex");
    assert_eq!(srv.hits.load(Ordering::SeqCst), 1);
    assert!(Fetcher::cache_path(cache.path(), "1810.04805").is_file());
    assert!(cache.path().join("1810.04805/src/glue.tex").is_file());

    let doc = parse_document(&archive).document;
    let glue = doc
        .tables
        .iter()
        .find(|t| t.caption == "GLUE Test results.")
        .expect("GLUE table");
    let header: Vec<String> = (0..glue.cols).map(|j| glue.cell_text(0, j)).collect();
    for want in ["System", "MNLI-(m/mm)", "QQP", "QNLI"] {
        assert!(header.iter().any(|h| h == want), "{want} not in {header:?}");
    }
    assert_eq!(glue.cell_text(3, 0), "BERTLARGE");
    assert_eq!(glue.cell_text(3, 1), "86.7/85.9");

    let again = fetcher.fetch("1810.04805", cache.path()).unwrap();
    assert_eq!(again, archive);
    assert_eq!(srv.hits.load(Ordering::SeqCst), 1, "cache hit must not touch the network");
}

#[test]
fn missing_and_pdf_only() {
    let srv = serve();
    let cache = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(&srv.url);
    assert!(matches!(fetcher.fetch("0000.00000", cache.path()), Err(LatexError::NotFound(_))));
    assert!(matches!(fetcher.fetch("2001.00002", cache.path()), Err(LatexError::NoSource(_))));
    assert!(matches!(fetcher.fetch("../etc", cache.path()), Err(LatexError::InvalidId(_))));
    assert_eq!(srv.hits.load(Ordering::SeqCst), 2);
    assert!(!cache.path().join("0000.00000").exists());
}
