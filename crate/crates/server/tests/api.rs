use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use bwtx_core::naive::sorted_rotations;
use bwtx_core::{preset_ordering, Preset, TextBuffer};
use bwtx_server::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(AppState::new(ServiceConfig::default()))
}

async fn send(
    app: &Router,
    method: Method,
    uri: &str,
    body: Body,
    json_body: bool,
) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if json_body {
        req = req.header("content-type", "application/json");
    }
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (s, b) = send(app, Method::GET, uri, Body::empty(), false).await;
    (s, serde_json::from_slice(&b).unwrap())
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let (s, b) = send(app, Method::POST, uri, Body::from(body.to_string()), true).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

async fn create(app: &Router, text: &[u8]) -> (StatusCode, Value) {
    let (s, b) = send(
        app,
        Method::POST,
        "/sessions",
        Body::from(text.to_vec()),
        false,
    )
    .await;
    (s, serde_json::from_slice(&b).unwrap())
}

async fn session(app: &Router, text: &str) -> String {
    let (s, v) = create(app, text.as_bytes()).await;
    assert_eq!(s, StatusCode::CREATED);
    v["session_id"].as_str().unwrap().to_string()
}

async fn transform(app: &Router, sid: &str, spec: Value) -> (StatusCode, Value) {
    post(app, &format!("/sessions/{sid}/transforms"), spec).await
}

async fn preset(app: &Router, sid: &str, name: &str) -> u64 {
    let (s, v) = transform(app, sid, json!({ "preset": name })).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    v["transform_id"].as_u64().unwrap()
}

fn assert_error(status: StatusCode, body: &Value, want: StatusCode, code: &str) {
    assert_eq!(status, want, "{body}");
    assert_eq!(body["code"], code, "{body}");
    assert!(body["message"].is_string());
}

#[tokio::test]
async fn create_session_reports_marker_and_alphabet() {
    let app = app();
    let (s, v) = create(&app, b"banana").await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["end_marker"], "$");
    assert_eq!(v["size"], 6);
    assert_eq!(
        v["alphabet"],
        json!([
            {"byte": 97, "char": "a", "count": 3},
            {"byte": 98, "char": "b", "count": 1},
            {"byte": 110, "char": "n", "count": 2},
        ])
    );

    let (_, v) = create(&app, b"cost $5").await;
    assert_eq!(v["end_marker_byte"], 0);
    assert_eq!(v["end_marker"], "\\x00");

    let (s, v) = create(&app, b"").await;
    assert_error(s, &v, StatusCode::BAD_REQUEST, "EmptyText");

    let every: Vec<u8> = (0..=255).collect();
    let (s, v) = create(&app, &every).await;
    assert_error(
        s,
        &v,
        StatusCode::UNPROCESSABLE_ENTITY,
        "NoEndMarkerAvailable",
    );
}

#[tokio::test]
async fn add_transform_reports_statistics() {
    let app = app();
    let sid = session(&app, "aacaacaacbdccccc").await;

    let (s, v) = transform(&app, &sid, json!({ "preset": "ascii" })).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["stats"]["run_count"], 9);
    assert_eq!(v["display"], "a<b<c<d");

    let (s, v) = transform(&app, &sid, json!({ "custom": "c,a,b,d" })).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["stats"]["run_count"], 6);
    assert_eq!(v["stats"]["original_size"], 16);

    let (s, v) = transform(&app, &sid, json!({ "custom": "a,b" })).await;
    assert_error(s, &v, StatusCode::UNPROCESSABLE_ENTITY, "MissingCharacters");

    let (s, v) = transform(&app, &sid, json!({ "preset": "chapin_tate" })).await;
    assert_error(s, &v, StatusCode::UNPROCESSABLE_ENTITY, "PresetUnavailable");

    let (s, v) = transform(&app, &sid, json!({ "preset": "nope" })).await;
    assert_error(s, &v, StatusCode::UNPROCESSABLE_ENTITY, "UnknownPreset");

    let (s, v) = transform(
        &app,
        &sid,
        json!({ "preset": "ascii", "custom": "a,b,c,d" }),
    )
    .await;
    assert_error(s, &v, StatusCode::BAD_REQUEST, "BadRequest");

    let (s, v) = transform(&app, "missing", json!({ "preset": "ascii" })).await;
    assert_error(s, &v, StatusCode::NOT_FOUND, "NotFound");

    let (s, v) = get(&app, &format!("/sessions/{sid}")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["transforms"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn window_matches_rotation_sort() {
    let app = app();
    let sid = session(&app, "banana").await;
    let tid = preset(&app, &sid, "ascii").await;
    let base = format!("/sessions/{sid}/transforms/{tid}/window");

    let (s, v) = get(
        &app,
        &format!("{base}?top_row=0&left_col=0&height=7&width=7"),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    let text = TextBuffer::new(b"banana".to_vec()).unwrap();
    let ordering = preset_ordering(Preset::Ascii, &text).unwrap();
    let rotations = sorted_rotations(&text, &ordering, 4096).unwrap();
    let rows: Vec<Vec<u8>> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| BASE64.decode(r.as_str().unwrap()).unwrap())
        .collect();
    let expected: Vec<Vec<u8>> = rotations.iter().map(|(_, r)| r.clone()).collect();
    assert_eq!(rows, expected);
    assert_eq!(
        BASE64.decode(v["last_column"].as_str().unwrap()).unwrap(),
        b"annb$aa"
    );
    assert_eq!(v["truncated"], false);

    let (_, v) = get(
        &app,
        &format!("{base}?top_row=0&left_col=0&height=1&width=1"),
    )
    .await;
    assert_eq!(BASE64.decode(v["rows"][0].as_str().unwrap()).unwrap(), b"$");

    let (s, v) = get(
        &app,
        &format!("{base}?top_row=7&left_col=0&height=1&width=1"),
    )
    .await;
    assert_error(s, &v, StatusCode::RANGE_NOT_SATISFIABLE, "OutOfBounds");

    let (s, v) = get(
        &app,
        &format!("{base}?top_row=0&left_col=0&height=2000&width=1"),
    )
    .await;
    assert_error(s, &v, StatusCode::BAD_REQUEST, "WindowTooLarge");

    let (s, v) = get(&app, &format!("{base}?top_row=zero")).await;
    assert_error(s, &v, StatusCode::BAD_REQUEST, "BadRequest");

    // repeated reads are identical
    let first = send(
        &app,
        Method::GET,
        &format!("{base}?height=3&width=4"),
        Body::empty(),
        false,
    )
    .await;
    let second = send(
        &app,
        Method::GET,
        &format!("{base}?height=3&width=4"),
        Body::empty(),
        false,
    )
    .await;
    assert_eq!(first, second);
}

#[tokio::test]
async fn search_finds_prefix_rows() {
    let app = app();
    let sid = session(&app, "banana").await;
    let tid = preset(&app, &sid, "ascii").await;
    let base = format!("/sessions/{sid}/transforms/{tid}/search");

    let (s, v) = get(
        &app,
        &format!("{base}?pattern=an&from_row=0&direction=forward"),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["row"], 2);
    assert_eq!(v["interval"], json!([2, 4]));

    let (_, v) = get(
        &app,
        &format!("{base}?pattern=an&from_row=6&direction=backward"),
    )
    .await;
    assert_eq!(v["row"], 3);

    let (_, v) = get(&app, &format!("{base}?pattern=zz")).await;
    assert_eq!(v["row"], Value::Null);

    let b64 = BASE64.encode(b"na");
    let (_, v) = get(&app, &format!("{base}?pattern_b64={b64}")).await;
    assert_eq!(v["interval"], json!([5, 7]));
}

#[tokio::test]
async fn highlights_and_propagation() {
    let app = app();
    let sid = session(&app, "banana").await;
    let ascii = preset(&app, &sid, "ascii").await;

    let (s, v) = post(
        &app,
        &format!("/sessions/{sid}/transforms/{ascii}/propagate"),
        json!({"row": 4}),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["rows"], json!([{"transform_id": ascii, "row": 4}]));

    let reverse = preset(&app, &sid, "reverse_ascii").await;
    let (_, v) = post(
        &app,
        &format!("/sessions/{sid}/transforms/{ascii}/propagate"),
        json!({"row": 4}),
    )
    .await;
    assert_eq!(
        v["rows"],
        json!([{"transform_id": ascii, "row": 4}, {"transform_id": reverse, "row": 3}])
    );
    let (_, v) = get(&app, &format!("/sessions/{sid}/transforms/{reverse}")).await;
    assert_eq!(v["highlights"], json!([3]));

    let (s, v) = post(
        &app,
        &format!("/sessions/{sid}/transforms/{ascii}/highlights"),
        json!({"row": 4, "on": false}),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["highlights"], json!([]));

    let (s, v) = post(
        &app,
        &format!("/sessions/{sid}/transforms/99/propagate"),
        json!({"row": 0}),
    )
    .await;
    assert_error(s, &v, StatusCode::NOT_FOUND, "NotFound");

    let (s, v) = post(
        &app,
        &format!("/sessions/{sid}/transforms/{ascii}/highlights"),
        json!({"row": 70}),
    )
    .await;
    assert_error(s, &v, StatusCode::RANGE_NOT_SATISFIABLE, "OutOfBounds");
}

#[tokio::test]
async fn analysis_kinds() {
    let app = app();
    let sid = session(&app, "aabaaabac").await;
    let tid = preset(&app, &sid, "ascii").await;
    let base = format!("/sessions/{sid}/transforms/{tid}/analysis");

    let (s, v) = get(&app, &format!("{base}?kind=run_breakers")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["items"].as_array().unwrap().len(), 1);
    assert_eq!(v["items"][0]["row"], 6);

    let sid = session(&app, "aacaacaacbdccccc").await;
    let tid = preset(&app, &sid, "ascii").await;
    let base = format!("/sessions/{sid}/transforms/{tid}/analysis");
    let (_, v) = get(&app, &format!("{base}?kind=potential_runs")).await;
    assert_eq!(v["items"][0]["character"], b'a');
    assert_eq!(v["items"][0]["total_length"], 6);
    assert_eq!(v["items"][0]["total_gap"], 2);

    let (_, v) = get(&app, &format!("{base}?kind=sections")).await;
    assert_eq!(v["items"][0]["rows"], json!({"start": 0, "end": 1}));

    // the end marker section holds one row, so it has no pairs
    let (s, v) = get(&app, &format!("{base}?kind=pairs&section=0")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["items"], json!([]));

    let (s, v) = get(&app, &format!("{base}?kind=pairs&section=40")).await;
    assert_error(s, &v, StatusCode::RANGE_NOT_SATISFIABLE, "OutOfBounds");

    let (s, v) = get(&app, &format!("{base}?kind=bogus")).await;
    assert_error(s, &v, StatusCode::BAD_REQUEST, "BadRequest");
}

#[tokio::test]
async fn propose_orderings() {
    let app = app();
    let sid = session(&app, "aacaacaacbdccccc").await;
    let tid = preset(&app, &sid, "ascii").await;
    let uri = format!("/sessions/{sid}/orderings/propose");

    let c = b'c';
    let a = b'a';
    let (s, v) = post(
        &app,
        &uri,
        json!({"base_transform_id": tid, "constraints": [{"lesser": c, "greater": a}]}),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["display"], "c<a<b<d");
    assert_eq!(v["preview_stats"]["run_count"], 6);

    let (s, v) = post(
        &app,
        &uri,
        json!({"base_transform_id": tid, "constraints": [{"lesser": c, "greater": a}, {"lesser": a, "greater": c}]}),
    )
    .await;
    assert_error(s, &v, StatusCode::CONFLICT, "CycleDetected");

    let (_, v) = post(&app, &uri, json!({"base_transform_id": tid})).await;
    assert_eq!(v["display"], "a<b<c<d");
    assert_eq!(v["preview_stats"]["run_count"], 9);

    let (_, v) = post(
        &app,
        &uri,
        json!({"base_transform_id": tid, "move": {"ch": c, "anchor": a, "placement": "before"}}),
    )
    .await;
    assert_eq!(v["display"], "c<a<b<d");
}

#[tokio::test]
async fn export_import_round_trip() {
    let app = app();
    let sid = session(&app, "aacaacaacbdccccc").await;
    preset(&app, &sid, "ascii").await;
    let (_, custom) = transform(&app, &sid, json!({"custom": "c,a,b,d", "name": "mine"})).await;
    let tid = custom["transform_id"].as_u64().unwrap();
    post(
        &app,
        &format!("/sessions/{sid}/transforms/{tid}/highlights"),
        json!({"row": 3}),
    )
    .await;
    let (_, original) = get(&app, &format!("/sessions/{sid}")).await;

    for cache in [false, true] {
        let (s, bytes) = send(
            &app,
            Method::GET,
            &format!("/sessions/{sid}/export?cache={cache}"),
            Body::empty(),
            false,
        )
        .await;
        assert_eq!(s, StatusCode::OK);
        let (s, b) = send(
            &app,
            Method::POST,
            "/sessions/import",
            Body::from(bytes),
            false,
        )
        .await;
        assert_eq!(s, StatusCode::CREATED);
        let v: Value = serde_json::from_slice(&b).unwrap();
        assert_eq!(v["warnings"], json!([]));
        let new_id = v["session_id"].as_str().unwrap();
        let (_, loaded) = get(&app, &format!("/sessions/{new_id}")).await;
        assert_eq!(loaded["transforms"], original["transforms"]);
        assert_eq!(loaded["alphabet"], original["alphabet"]);
    }

    let (s, b) = send(
        &app,
        Method::POST,
        "/sessions/import",
        Body::from(&b"not a session"[..]),
        false,
    )
    .await;
    let v: Value = serde_json::from_slice(&b).unwrap();
    assert_error(s, &v, StatusCode::UNPROCESSABLE_ENTITY, "CorruptFile");

    // importing into an existing session replaces its contents
    let other = session(&app, "xyz").await;
    let (_, bytes) = send(
        &app,
        Method::GET,
        &format!("/sessions/{sid}/export"),
        Body::empty(),
        false,
    )
    .await;
    let (s, _) = send(
        &app,
        Method::POST,
        &format!("/sessions/{other}/import"),
        Body::from(bytes),
        false,
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    let (_, loaded) = get(&app, &format!("/sessions/{other}")).await;
    assert_eq!(loaded["transforms"], original["transforms"]);
}

#[tokio::test]
async fn delete_transform() {
    let app = app();
    let sid = session(&app, "banana").await;
    let tid = preset(&app, &sid, "ascii").await;
    let uri = format!("/sessions/{sid}/transforms/{tid}");
    let (s, _) = send(&app, Method::DELETE, &uri, Body::empty(), false).await;
    assert_eq!(s, StatusCode::NO_CONTENT);
    let (s, v) = get(&app, &uri).await;
    assert_error(s, &v, StatusCode::NOT_FOUND, "NotFound");
}
