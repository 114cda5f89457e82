use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use scimine_core::docmodel::{AnnotatedDocument, ReviewState};
use scimine_core::pipeline::{review, Correction, PipelineError, Workspace};
use scimine_core::synth::{review_corrections, synth_corpus, SynthConfig};
use scimine_server::{router, AppState, ServeError, Server};
use serde_json::{json, Value};

const TOKEN: &str = "secret";

/// A workspace holding three unreviewed documents with their entities
/// stripped, plus the gold versions they should end up as.
fn setup() -> (tempfile::TempDir, Vec<AnnotatedDocument>) {
    let dir = tempfile::tempdir().unwrap();
    let ws = Workspace::init(dir.path()).unwrap();
    let corpus = synth_corpus(&SynthConfig::default());
    let gold: Vec<AnnotatedDocument> = corpus.docs.into_iter().filter(|d| d.entities.len() >= 5).take(3).collect();
    assert_eq!(gold.len(), 3);
    for g in &gold {
        let mut auto = g.clone();
        auto.entities.clear();
        auto.relations.clear();
        auto.review_state = ReviewState::Unreviewed;
        auto.version = 0;
        ws.save_parsed(&auto.doc).unwrap();
        ws.save_annotation(&auto).unwrap();
    }
    (dir, gold)
}

fn app(dir: &tempfile::TempDir) -> Router {
    router(AppState::new(Workspace::open(dir.path()).unwrap(), Some(TOKEN.into())))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    use tower::ServiceExt;
    let mut req = Request::builder().method(method).uri(uri).header("authorization", format!("Bearer {TOKEN}"));
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

fn add_corrections(auto: &AnnotatedDocument, gold: &AnnotatedDocument, n: usize) -> Vec<Correction> {
    let c: Vec<Correction> = review_corrections(auto, gold).into_iter().filter(|c| matches!(c, Correction::Add { .. })).take(n).collect();
    assert_eq!(c.len(), n);
    c
}

#[tokio::test]
async fn lists_pending_documents() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let (s, v) = call(&app, Method::GET, "/api/docs?status=pending", None).await;
    assert_eq!(s, StatusCode::OK);
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|d| d["doc_id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 3);
    for g in &gold {
        assert!(ids.contains(&g.doc_id()));
    }
    let (_, v) = call(&app, Method::GET, "/api/docs?status=done", None).await;
    assert_eq!(v.as_array().unwrap().len(), 0);
    let (s, _) = call(&app, Method::GET, "/api/docs?status=bogus", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let domain = serde_json::to_value(gold[0].doc.domain_tag).unwrap();
    let (_, v) = call(&app, Method::GET, &format!("/api/docs?domain={}", domain.as_str().unwrap()), None).await;
    assert!(v.as_array().unwrap().iter().all(|d| d["domain"] == domain));
    assert!(!v.as_array().unwrap().is_empty());
}

#[tokio::test]
async fn document_view_and_missing_document() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let (s, v) = call(&app, Method::GET, &format!("/api/docs/{}", gold[0].doc_id()), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["version"], 0);
    assert_eq!(v["status"], "pending");
    assert_eq!(v["entities"], json!([]));
    assert!(v["validation"].is_object());
    let (s, v) = call(&app, Method::GET, "/api/docs/9999.99999", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "not_found");
}

#[tokio::test]
async fn stale_version_is_a_conflict() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let id = gold[0].doc_id();
    let auto = Workspace::open(dir.path()).unwrap().load_annotation(id).unwrap();
    let c = add_corrections(&auto, &gold[0], 2);
    let uri = format!("/api/docs/{id}");
    let (s, v) = call(&app, Method::PATCH, &uri, Some(json!({"version": 0, "corrections": [c[0]]}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["version"], 1);
    let (s, v) = call(&app, Method::PATCH, &uri, Some(json!({"version": 0, "corrections": [c[1]]}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["code"], "stale_version");
    assert_eq!(v["current_version"], 1);
}

#[tokio::test]
async fn invalid_correction_is_rejected() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let uri = format!("/api/docs/{}", gold[0].doc_id());
    let (s, v) = call(&app, Method::PATCH, &uri, Some(json!({"version": 0, "corrections": [{"op": "remove", "id": 42}]}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    let (_, v) = call(&app, Method::GET, &uri, None).await;
    assert_eq!(v["version"], 0);
}

#[tokio::test]
async fn full_review_session() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let id = gold[1].doc_id();
    let ws = Workspace::open(dir.path()).unwrap();
    let auto = ws.load_annotation(id).unwrap();

    let (_, before) = call(&app, Method::GET, "/api/rounds", None).await;
    assert_eq!(before["gold"], json!([]));

    let (s, v) = call(&app, Method::POST, &format!("/api/docs/{id}/claim"), Some(json!({"reviewer": "ana"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "in_progress");
    let (s, v) = call(&app, Method::POST, &format!("/api/docs/{id}/claim"), Some(json!({"reviewer": "bo"}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["code"], "task_claimed");

    let mut version = 0;
    for c in add_corrections(&auto, &gold[1], 5) {
        let body = json!({"version": version, "corrections": [c], "reviewer": "ana"});
        let (s, v) = call(&app, Method::PATCH, &format!("/api/docs/{id}"), Some(body)).await;
        assert_eq!(s, StatusCode::OK, "{v}");
        version = v["version"].as_u64().unwrap();
    }
    assert_eq!(version, 5);

    let (s, v) = call(&app, Method::POST, &format!("/api/docs/{id}/complete"), Some(json!({"version": version, "reviewer": "ana"}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["review_state"], "gold");
    assert_eq!(v["entities"].as_array().unwrap().len(), 5);

    let (_, after) = call(&app, Method::GET, "/api/rounds", None).await;
    assert_eq!(after["gold"], json!([id]));
    let (_, done) = call(&app, Method::GET, "/api/docs?status=done", None).await;
    assert_eq!(done.as_array().unwrap().len(), 1);

    let (s, log) = call(&app, Method::GET, &format!("/api/docs/{id}/log"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(log.as_array().unwrap().len(), 7);

    let stored = ws.load_annotation(id).unwrap();
    let replayed = review::replay(&ws.review_base(id).unwrap().unwrap(), &ws.read_log(id).unwrap()).unwrap();
    assert_eq!(replayed, stored);

    let (s, v) = call(&app, Method::POST, &format!("/api/docs/{id}/complete"), Some(json!({"version": stored.version}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["code"], "already_gold");

    let (s, v) = call(&app, Method::POST, &format!("/api/docs/{id}/reopen"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "pending");
    let (_, after) = call(&app, Method::GET, "/api/rounds", None).await;
    assert_eq!(after["gold"], json!([]));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn parallel_clients_on_different_documents() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let ws = Workspace::open(dir.path()).unwrap();
    let mut handles = Vec::new();
    for g in &gold {
        let auto = ws.load_annotation(g.doc_id()).unwrap();
        let c = add_corrections(&auto, g, 3);
        let app = app.clone();
        let uri = format!("/api/docs/{}", g.doc_id());
        handles.push(tokio::spawn(async move {
            let mut version = 0;
            for c in c {
                let (s, v) = call(&app, Method::PATCH, &uri, Some(json!({"version": version, "corrections": [c]}))).await;
                assert_eq!(s, StatusCode::OK, "{v}");
                version = v["version"].as_u64().unwrap();
            }
            version
        }));
    }
    for h in handles {
        assert_eq!(h.await.unwrap(), 3);
    }
    for g in &gold {
        assert_eq!(ws.load_annotation(g.doc_id()).unwrap().entities.len(), 3);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn parallel_clients_on_one_document() {
    let (dir, gold) = setup();
    let app = app(&dir);
    let id = gold[2].doc_id().to_string();
    let auto = Workspace::open(dir.path()).unwrap().load_annotation(&id).unwrap();
    let cs = add_corrections(&auto, &gold[2], 5);
    let handles: Vec<_> = cs
        .into_iter()
        .map(|c| {
            let app = app.clone();
            let uri = format!("/api/docs/{id}");
            tokio::spawn(async move { call(&app, Method::PATCH, &uri, Some(json!({"version": 0, "corrections": [c]}))).await })
        })
        .collect();
    let mut ok = 0;
    for h in handles {
        let (s, v) = h.await.unwrap();
        match s {
            StatusCode::OK => ok += 1,
            StatusCode::CONFLICT => assert_eq!(v["current_version"], 1),
            other => panic!("unexpected {other}: {v}"),
        }
    }
    assert_eq!(ok, 1);
    let stored = Workspace::open(dir.path()).unwrap().load_annotation(&id).unwrap();
    assert_eq!(stored.version, 1);
    assert_eq!(stored.entities.len(), 1);
}

#[tokio::test]
async fn token_is_required() {
    use tower::ServiceExt;
    let (dir, _) = setup();
    let app = app(&dir);
    for auth in [None, Some("Bearer wrong"), Some(TOKEN)] {
        let mut req = Request::builder().uri("/api/docs");
        if let Some(a) = auth {
            req = req.header("authorization", a);
        }
        let resp = app.clone().oneshot(req.body(Body::empty()).unwrap()).await.unwrap();
        assert_eq!(resp.status(), StatusCode::UNAUTHORIZED);
    }
    let (s, _) = call(&app, Method::GET, "/api/docs", None).await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test]
async fn schema_lists_types_and_colors() {
    let (dir, _) = setup();
    let (s, v) = call(&app(&dir), Method::GET, "/api/schema", None).await;
    assert_eq!(s, StatusCode::OK);
    let types = v["entity_types"].as_array().unwrap();
    assert_eq!(types.len(), 7);
    let colors: std::collections::HashSet<&str> = types.iter().map(|t| t["color"].as_str().unwrap()).collect();
    assert_eq!(colors.len(), 7);
    assert!(!v["checklist"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn one_service_per_workspace() {
    let (dir, _) = setup();
    let addr = "127.0.0.1:0".parse().unwrap();
    let first = Server::bind(Workspace::open(dir.path()).unwrap(), addr, None).await.unwrap();
    let second = Server::bind(Workspace::open(dir.path()).unwrap(), addr, None).await;
    assert!(matches!(second, Err(ServeError::Pipeline(PipelineError::WorkspaceLocked(_)))));
    drop(first);
    Server::bind(Workspace::open(dir.path()).unwrap(), addr, None).await.unwrap();
}

#[tokio::test]
async fn port_in_use() {
    let (dir, _) = setup();
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap();
    let r = Server::bind(Workspace::open(dir.path()).unwrap(), addr, None).await;
    assert!(matches!(r, Err(ServeError::AddrInUse(a)) if a == addr));
    // The failed bind released the workspace.
    Server::bind(Workspace::open(dir.path()).unwrap(), "127.0.0.1:0".parse().unwrap(), None).await.unwrap();
}

#[tokio::test]
async fn served_over_tcp() {
    let (dir, _) = setup();
    let server = Server::bind(Workspace::open(dir.path()).unwrap(), "127.0.0.1:0".parse().unwrap(), None).await.unwrap();
    let addr = server.local_addr().unwrap();
    tokio::spawn(server.run());
    let body = tokio::task::spawn_blocking(move || {
        use std::io::{Read, Write};
        let mut s = std::net::TcpStream::connect(addr).unwrap();
        write!(s, "GET /api/schema HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n").unwrap();
        let mut out = String::new();
        s.read_to_string(&mut out).unwrap();
        out
    })
    .await
    .unwrap();
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    assert!(body.contains("entity_types"));
}
