//! End-to-end HTTP tests: real listener, real client, real corpus on disk.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

use convo_core::config::AnalysisConfig;
use convo_service::router;
use convo_store::CorpusStore;

const SIX_CUE_VTT: &str = "WEBVTT\n\
\n\
1\n\
00:00:00.000 --> 00:00:10.000\n\
Alice M: Welcome to the session everyone.\n\
\n\
2\n\
00:00:11.000 --> 00:00:14.000\n\
Bob: Thanks, happy to be here.\n\
\n\
3\n\
00:00:15.000 --> 00:00:21.000\n\
Alice M: Let's review the homework first.\n\
\n\
4\n\
00:00:22.000 --> 00:00:24.500\n\
Bob: I had a question on problem two.\n\
\n\
5\n\
00:00:25.000 --> 00:00:33.000\n\
Alice M: Sure, walk us through it.\n\
\n\
6\n\
00:00:34.000 --> 00:00:36.000\n\
Bob: The integral sign flipped on me.\n";

/// Initialize a corpus and serve it on an ephemeral port.
async fn serve(dir: &Path) -> (PathBuf, SocketAddr) {
    let root = dir.join("corpus");
    CorpusStore::init(&root).expect("corpus init");
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(root.clone());
    tokio::spawn(async move {
        axum::serve(listener, app).await.unwrap();
    });
    (root, addr)
}

fn client() -> reqwest::Client {
    reqwest::Client::new()
}

async fn register(client: &reqwest::Client, addr: SocketAddr, date: &str) -> String {
    let response = client
        .post(format!("http://{addr}/meetings"))
        .body(format!("{{\"date\":\"{date}\",\"course\":\"math-101\"}}"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 201);
    let doc: serde_json::Value = response.json().await.unwrap();
    doc["meeting_id"].as_str().unwrap().to_string()
}

async fn upload(
    client: &reqwest::Client,
    addr: SocketAddr,
    id: &str,
    vtt: &str,
) -> reqwest::Response {
    client
        .put(format!("http://{addr}/meetings/{id}/transcript"))
        .header("content-type", "text/vtt")
        .body(vtt.to_string())
        .send()
        .await
        .unwrap()
}

#[tokio::test]
async fn healthz_reports_ok() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let response = client().get(format!("http://{addr}/healthz")).send().await.unwrap();
    assert_eq!(response.status(), 200);
    assert_eq!(
        response.headers()["content-type"].to_str().unwrap(),
        "application/json"
    );
    assert_eq!(
        response.text().await.unwrap(),
        "{\"schema_version\":1,\"status\":\"ok\"}\n"
    );
}

#[tokio::test]
async fn register_upload_fetch_flow() {
    let dir = TempDir::new().unwrap();
    let (root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-02").await;
    assert_eq!(id.len(), 8);

    let response = upload(&client, addr, &id, SIX_CUE_VTT).await;
    assert_eq!(response.status(), 200);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["warnings"].as_array().unwrap().len(), 0);

    let url = format!("http://{addr}/meetings/{id}/metrics");
    let first = client.get(&url).send().await.unwrap();
    assert_eq!(first.status(), 200);
    let first_body = first.text().await.unwrap();
    let doc: serde_json::Value = serde_json::from_str(&first_body).unwrap();
    assert_eq!(doc["meeting_id"], id.as_str());
    assert_eq!(doc["n_utterances"], 6);
    assert_eq!(doc["date"], "2026-03-02");

    // Pure read: an immediate repeat returns the same bytes.
    let second_body = client.get(&url).send().await.unwrap().text().await.unwrap();
    assert_eq!(first_body, second_body);

    // Served bytes equal the store's own report document plus the newline
    // terminator every body carries.
    let store = CorpusStore::open(&root).unwrap();
    let expected = store.meeting_report_json(&id, &AnalysisConfig::default()).unwrap();
    assert_eq!(first_body, format!("{expected}\n"));
}

#[tokio::test]
async fn metrics_before_any_transcript_are_null() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-03").await;
    let response = client
        .get(format!("http://{addr}/meetings/{id}/metrics"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 200);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["n_utterances"], 0);
    assert!(doc["mcv"]["whole"].is_null());
    assert!(doc["mcv"]["first_half"].is_null());
    assert!(doc["mcv"]["second_half"].is_null());
    assert_eq!(doc["duration_seconds"], 0.0, "no transcribed speech");
    assert_eq!(doc["speakers"].as_array().unwrap().len(), 0);
}

#[tokio::test]
async fn malformed_transcript_is_422_parse_failure() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-04").await;
    let response = upload(&client, addr, &id, "this is not a transcript\n").await;
    assert_eq!(response.status(), 422);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "parse_failure");
    assert_eq!(doc["status"], 422);
    let message = doc["message"].as_str().unwrap();
    assert!(message.contains("MissingHeader"), "kind named: {message}");
    assert!(message.contains("line 1"), "line diagnostics: {message}");

    // The failed upload must leave no transcript behind.
    let metrics: serde_json::Value = client
        .get(format!("http://{addr}/meetings/{id}/metrics"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(metrics["n_utterances"], 0);
}

#[tokio::test]
async fn invalid_utf8_upload_is_422() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-05").await;
    let response = client
        .put(format!("http://{addr}/meetings/{id}/transcript"))
        .body(vec![0x57, 0x45, 0x42, 0xff, 0xfe])
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 422);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "parse_failure");
}

#[tokio::test]
async fn unknown_meeting_metrics_is_404() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let response = client()
        .get(format!("http://{addr}/meetings/zzzzzzzz/metrics"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 404);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "unknown_meeting");
    assert_eq!(doc["status"], 404);
}

#[tokio::test]
async fn upload_to_unknown_meeting_is_404() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let response = upload(&client(), addr, "zzzzzzzz", SIX_CUE_VTT).await;
    assert_eq!(response.status(), 404);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "unknown_meeting");
}

#[tokio::test]
async fn oversized_upload_is_413() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-06").await;
    let mut body = String::from("WEBVTT\n\n");
    body.push_str(&"a".repeat(10 * 1024 * 1024));
    let response = upload(&client, addr, &id, &body).await;
    assert_eq!(response.status(), 413);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "parse_failure");
    assert!(doc["message"].as_str().unwrap().contains("10 MiB"));
}

#[tokio::test]
async fn trend_endpoint_serves_students() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-07").await;
    assert_eq!(upload(&client, addr, &id, SIX_CUE_VTT).await.status(), 200);

    let response = client
        .get(format!("http://{addr}/students/ext-alice-m/trend"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 200);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["student_id"], "ext-alice-m");
    assert_eq!(doc["segment"], "whole");
    assert!(doc["slope"].is_null());

    let response = client
        .get(format!("http://{addr}/students/ext-alice-m/trend?segment=h1"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 200);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["segment"], "first_half");

    let response = client
        .get(format!("http://{addr}/students/ext-nobody/trend"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 404);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "unknown_student");

    let response = client
        .get(format!("http://{addr}/students/ext-alice-m/trend?segment=banana"))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 422);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["code"], "parse_failure");
}

#[tokio::test]
async fn cohort_summary_reports_characteristics() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-08").await;
    assert_eq!(upload(&client, addr, &id, SIX_CUE_VTT).await.status(), 200);

    let response = client.get(format!("http://{addr}/cohort/summary")).send().await.unwrap();
    assert_eq!(response.status(), 200);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["characteristics"]["n_meetings"], 1);
    assert_eq!(doc["characteristics"]["n_students"], 2);
    assert_eq!(doc["segment"], "whole");
}

#[tokio::test]
async fn registration_body_is_validated() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    for body in [
        "not json at all",
        "{\"date\":\"March 2nd\"}",
        "{\"course\":\"math\"}",
        "{\"date\":\"2026-03-02\",\"surprise\":true}",
    ] {
        let response = client
            .post(format!("http://{addr}/meetings"))
            .body(body)
            .send()
            .await
            .unwrap();
        assert_eq!(response.status(), 422, "body {body:?} must be rejected");
        let doc: serde_json::Value = response.json().await.unwrap();
        assert_eq!(doc["code"], "parse_failure");
    }
}

#[tokio::test]
async fn unmatched_routes_get_json_errors() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();

    let response = client.get(format!("http://{addr}/nope")).send().await.unwrap();
    assert_eq!(response.status(), 404);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["status"], 404);

    let response = client.get(format!("http://{addr}/meetings")).send().await.unwrap();
    assert_eq!(response.status(), 405);
    let doc: serde_json::Value = response.json().await.unwrap();
    assert_eq!(doc["status"], 405);
}

#[tokio::test]
async fn concurrent_reads_agree() {
    let dir = TempDir::new().unwrap();
    let (_root, addr) = serve(dir.path()).await;
    let client = client();
    let id = register(&client, addr, "2026-03-09").await;
    assert_eq!(upload(&client, addr, &id, SIX_CUE_VTT).await.status(), 200);

    let url = format!("http://{addr}/meetings/{id}/metrics");
    let mut tasks = Vec::new();
    for _ in 0..8 {
        let client = client.clone();
        let url = url.clone();
        tasks.push(tokio::spawn(async move {
            client.get(&url).send().await.unwrap().text().await.unwrap()
        }));
    }
    let mut bodies = Vec::new();
    for task in tasks {
        bodies.push(task.await.unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]), "all readers saw the same bytes");
}
