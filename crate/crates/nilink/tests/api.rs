mod common;

use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use nilink::api::{app, router};
use nilink::store::SessionStore;
use serde_json::{json, Value};
use tower::ServiceExt;

fn setup(n: u64) -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    let mut store = SessionStore::open(dir.path()).unwrap();
    store.create(common::session("s1", n)).unwrap();
    let app = router(Arc::new(Mutex::new(store)));
    (dir, app)
}

async fn call(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, Value, String) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (status, json, text)
}

async fn vote(app: &Router, entry: u64, who: &str, choice: &str) -> (StatusCode, Value) {
    let mut body = json!({"entry_id": entry, "annotator_id": who, "choice": choice});
    if choice == "NIL" {
        body["nil_pattern"] = json!("MissingEntity");
    }
    let (s, v, _) = call(app, "POST", "/api/session/s1/annotation", Some(body)).await;
    (s, v)
}

#[tokio::test]
async fn next_serves_tasks_with_candidate_cards() {
    let (_d, app) = setup(2);
    let (s, v, _) = call(&app, "GET", "/api/session/s1/next?annotator=ann", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["done"], json!(false));
    assert_eq!(v["task"]["entry_id"], json!(0));
    assert_eq!(v["task"]["mention"], json!("Apple"));
    assert_eq!(
        v["task"]["candidates"][0]["description"],
        json!("American technology company")
    );
    for id in 0..2 {
        vote(&app, id, "ann", "Apple Inc.").await;
    }
    let (_, v, _) = call(&app, "GET", "/api/session/s1/next?annotator=ann", None).await;
    assert_eq!(v["done"], json!(true));
    assert_eq!(v["task"], Value::Null);
    let (_, v, _) = call(&app, "GET", "/api/session/s1/next?annotator=bob", None).await;
    assert_eq!(v["task"]["entry_id"], json!(0));
}

#[tokio::test]
async fn full_annotation_round() {
    let (_d, app) = setup(10);
    for id in 0..10 {
        for who in ["ann", "bob", "cat"] {
            let choice = if id == 4 && who == "bob" {
                "NIL"
            } else {
                "Apple Inc."
            };
            let (s, v) = vote(&app, id, who, choice).await;
            assert_eq!(s, StatusCode::OK, "{v}");
        }
    }
    let (_, v, _) = call(&app, "GET", "/api/session/s1/progress", None).await;
    assert_eq!(
        v,
        json!({"pending": 0, "agreed": 9, "disputed": 1, "adjudicated": 0})
    );
    let (_, v, _) = call(&app, "GET", "/api/session/s1/agreement", None).await;
    assert_eq!(v["agreement_rate"], json!(0.9));
    assert_eq!(v["entries"], json!(10));

    let (_, v, _) = call(&app, "GET", "/api/session/s1/disputes", None).await;
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 1);
    assert_eq!(list[0]["entry_id"], json!(4));
    assert_eq!(list[0]["votes"].as_array().unwrap().len(), 3);
    assert_eq!(list[0]["votes"][1]["choice"], json!("NIL"));

    let body = json!({"entry_id": 4, "expert_id": "exp", "choice": "NIL", "nil_pattern": "NonEntityPhrase"});
    let (s, v, _) = call(
        &app,
        "POST",
        "/api/session/s1/adjudication",
        Some(body.clone()),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(
        v,
        json!({"entry_id": 4, "status": "Adjudicated", "answer": "NIL"})
    );
    let (s, _, _) = call(&app, "POST", "/api/session/s1/adjudication", Some(body)).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, _, text) = call(&app, "GET", "/api/session/s1/export", None).await;
    assert_eq!(s, StatusCode::OK);
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[4]["answer"], json!("NIL"));
    assert_eq!(lines[4]["nil_pattern"], json!("NonEntityPhrase"));
    assert_eq!(lines[0]["answer"], json!("Apple Inc."));
}

#[tokio::test]
async fn error_codes() {
    let (_d, app) = setup(1);
    let (s, v, _) = call(&app, "GET", "/api/session/nope/progress", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert!(v["error"].as_str().unwrap().contains("nope"));
    let (s, _, _) = call(&app, "GET", "/api/session/s1/next?annotator=zed", None).await;
    assert_eq!(s, StatusCode::FORBIDDEN);
    assert_eq!(vote(&app, 0, "zed", "Apple").await.0, StatusCode::FORBIDDEN);
    assert_eq!(vote(&app, 7, "ann", "Apple").await.0, StatusCode::NOT_FOUND);
    assert_eq!(
        vote(&app, 0, "ann", "Banana").await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    let no_pattern = json!({"entry_id": 0, "annotator_id": "ann", "choice": "NIL"});
    let (s, _, _) = call(&app, "POST", "/api/session/s1/annotation", Some(no_pattern)).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let bad_pattern =
        json!({"entry_id": 0, "annotator_id": "ann", "choice": "NIL", "nil_pattern": "Other"});
    let (s, _, _) = call(
        &app,
        "POST",
        "/api/session/s1/annotation",
        Some(bad_pattern),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, _, _) = call(&app, "GET", "/api/session/s1/agreement", None).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let not_disputed = json!({"entry_id": 0, "expert_id": "exp", "choice": "Apple"});
    let (s, _, _) = call(
        &app,
        "POST",
        "/api/session/s1/adjudication",
        Some(not_disputed),
    )
    .await;
    assert_eq!(s, StatusCode::CONFLICT);
    let not_expert = json!({"entry_id": 0, "expert_id": "ann", "choice": "Apple"});
    let (s, _, _) = call(
        &app,
        "POST",
        "/api/session/s1/adjudication",
        Some(not_expert),
    )
    .await;
    assert_eq!(s, StatusCode::FORBIDDEN);
    let (s, _, _) = call(&app, "GET", "/api/session/s1/progress", None).await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test]
async fn state_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    {
        let mut store = SessionStore::open(dir.path()).unwrap();
        store.create(common::session("s1", 3)).unwrap();
        let app = router(Arc::new(Mutex::new(store)));
        vote(&app, 0, "ann", "Apple").await;
        vote(&app, 0, "bob", "NIL").await;
    }
    let store = SessionStore::open(dir.path()).unwrap();
    let app = router(Arc::new(Mutex::new(store)));
    let (_, v, _) = call(&app, "GET", "/api/session/s1/next?annotator=ann", None).await;
    assert_eq!(v["task"]["entry_id"], json!(1));
    let (_, v, _) = call(&app, "GET", "/api/session/s1/next?annotator=bob", None).await;
    assert_eq!(v["task"]["entry_id"], json!(1));
    let (_, v, _) = call(&app, "GET", "/api/session/s1/next?annotator=cat", None).await;
    assert_eq!(v["task"]["entry_id"], json!(0));
}

#[tokio::test]
async fn static_assets_fall_back_to_directory() {
    let dir = tempfile::tempdir().unwrap();
    let assets = tempfile::tempdir().unwrap();
    std::fs::write(assets.path().join("index.html"), "<h1>annotate</h1>").unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    let app = app(
        Arc::new(Mutex::new(store)),
        Some(assets.path().to_path_buf()),
    );
    let (s, _, text) = call(&app, "GET", "/index.html", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(text.contains("annotate"));
    let (s, _, _) = call(&app, "GET", "/api/session/none/progress", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}
