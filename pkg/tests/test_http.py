import pytest
from starlette.testclient import TestClient

from writecoach.services.auth import Role, issue_token
from writecoach.services.http import create_app

FIXED_TIME = 1_700_000_000.0
SECRET = "test-secret"

DOCUMENT = "Many peoples use email daily. All clear here."
MODEL_BODY = {"backend_id": "oracle", "model_name": "rules-v1"}


@pytest.fixture
def client(runtime):
    with TestClient(create_app(runtime)) as test_client:
        test_client.runtime = runtime
        yield test_client


def auth(user_id, role=Role.STUDENT):
    token = issue_token(SECRET, user_id, role, clock=lambda: FIXED_TIME)
    return {"Authorization": f"Bearer {token}"}


def start_document(client, text=DOCUMENT, user="student-1", **extra):
    response = client.post(
        "/api/documents", json={"text": text, **MODEL_BODY, **extra}, headers=auth(user)
    )
    assert response.status_code == 201, response.text
    return response.json()


def test_requests_without_token_are_401(client):
    assert client.get("/api/models").status_code == 401
    assert client.post("/api/documents", json={}).status_code == 401
    bad = {"Authorization": "Bearer nonsense"}
    assert client.get("/api/models", headers=bad).status_code == 401
    stale = issue_token(SECRET, "u", Role.STUDENT, ttl_s=1, clock=lambda: FIXED_TIME - 100)
    assert (
        client.get("/api/models", headers={"Authorization": f"Bearer {stale}"}).status_code
        == 401
    )


def test_dev_token_endpoint_mints_usable_tokens(client):
    response = client.post("/api/dev/token", json={"user": "student-9", "role": "student"})
    assert response.status_code == 200
    token = response.json()["token"]
    models = client.get("/api/models", headers={"Authorization": f"Bearer {token}"})
    assert models.status_code == 200
    assert models.json()["models"][0]["backend_id"] == "oracle"


def test_dev_token_rejects_unknown_role(client):
    response = client.post("/api/dev/token", json={"user": "x", "role": "admin"})
    assert response.status_code == 422


def test_document_flow_to_completion(client):
    created = start_document(client)
    assert created["sentence_count"] == 2
    session_id = created["session_id"]

    view = client.get(f"/api/sessions/{session_id}", headers=auth("student-1")).json()
    statuses = [s["status"] for s in view["sentences"]]
    assert statuses == ["analyzing", "analyzing"]

    client.runtime.drain()
    view = client.get(f"/api/sessions/{session_id}", headers=auth("student-1")).json()
    first, second = view["sentences"]
    assert first["status"] == "awaiting_revision"
    assert first["current_level"] == 1
    assert first["delivered_hints"] == [
        {"level": 1, "hint": first["delivered_hints"][0]["hint"]}
    ]
    assert first["revisions_left"] == 3
    assert second["status"] == "completed"
    assert second["hint_level_used"] is None
    assert view["progress"]["total_sentences"] == 2
    assert view["progress"]["errors_identified"] == 1

    revised = client.post(
        f"/api/sessions/{session_id}/sentences/0/revisions",
        json={"text": "Many people use email daily."},
        headers=auth("student-1"),
    )
    assert revised.status_code == 202
    assert revised.json()["correlation_id"]

    client.runtime.drain()
    view = client.get(f"/api/sessions/{session_id}", headers=auth("student-1")).json()
    first = view["sentences"][0]
    assert first["status"] == "completed"
    assert first["hint_level_used"] == 1
    assert first["active_text"] == "Many people use email daily."
    assert view["progress"]["errors_corrected"] == 1


def test_session_access_control(client):
    session_id = start_document(client)["session_id"]
    assert (
        client.get(f"/api/sessions/{session_id}", headers=auth("someone-else")).status_code
        == 403
    )
    assert (
        client.get(
            f"/api/sessions/{session_id}", headers=auth("teacher-1", Role.TEACHER)
        ).status_code
        == 200
    )
    assert (
        client.get(
            f"/api/sessions/{session_id}", headers=auth("res-1", Role.RESEARCHER)
        ).status_code
        == 200
    )


def test_unknown_session_404(client):
    assert client.get("/api/sessions/ghost", headers=auth("student-1")).status_code == 404


def test_only_owner_submits_revisions(client):
    session_id = start_document(client)["session_id"]
    client.runtime.drain()
    response = client.post(
        f"/api/sessions/{session_id}/sentences/0/revisions",
        json={"text": "Anything."},
        headers=auth("teacher-1", Role.TEACHER),
    )
    assert response.status_code == 403


def test_revision_conflicts_map_to_409(client):
    session_id = start_document(client)["session_id"]
    # Still analyzing: no hint delivered yet, so a revision is premature.
    early = client.post(
        f"/api/sessions/{session_id}/sentences/0/revisions",
        json={"text": "Too soon."},
        headers=auth("student-1"),
    )
    assert early.status_code == 409

    client.runtime.drain()
    # Sentence 1 completed on the initial pass; revising it is also a conflict.
    done = client.post(
        f"/api/sessions/{session_id}/sentences/1/revisions",
        json={"text": "Still fine."},
        headers=auth("student-1"),
    )
    assert done.status_code == 409


def test_unprocessable_inputs_map_to_422(client):
    headers = auth("student-1")
    blank = client.post(
        "/api/documents", json={"text": "   ", **MODEL_BODY}, headers=headers
    )
    assert blank.status_code == 422

    unknown_backend = client.post(
        "/api/documents",
        json={"text": "Fine.", "backend_id": "ghost", "model_name": "m"},
        headers=headers,
    )
    assert unknown_backend.status_code == 422

    bad_config = client.post(
        "/api/documents",
        json={"text": "Fine.", **MODEL_BODY, "temperature": -1.0},
        headers=headers,
    )
    assert bad_config.status_code == 422

    session_id = start_document(client)["session_id"]
    client.runtime.drain()
    empty_revision = client.post(
        f"/api/sessions/{session_id}/sentences/0/revisions",
        json={"text": "  "},
        headers=headers,
    )
    assert empty_revision.status_code == 422


def test_unresolved_sentence_exposes_correction(client):
    created = start_document(client, text="Second is Online games.")
    session_id = created["session_id"]
    for revision in (
        "Second is Online game.",
        "Second is Online games!",
        "Second is Online games too.",
    ):
        client.runtime.drain()
        response = client.post(
            f"/api/sessions/{session_id}/sentences/0/revisions",
            json={"text": revision},
            headers=auth("student-1"),
        )
        assert response.status_code == 202
    client.runtime.drain()

    view = client.get(f"/api/sessions/{session_id}", headers=auth("student-1")).json()
    sentence = view["sentences"][0]
    assert sentence["status"] == "unresolved"
    assert sentence["revisions_left"] == 0
    assert sentence["suggested_correction"] == "Second is online games too."
    assert sentence["explanation"]
    # A fourth revision is refused outright.
    refused = client.post(
        f"/api/sessions/{session_id}/sentences/0/revisions",
        json={"text": "One more try."},
        headers=auth("student-1"),
    )
    assert refused.status_code == 409


def test_course_and_task_flow(client):
    teacher = auth("teacher-1", Role.TEACHER)
    assert client.post("/api/courses", json={"name": "W101"}, headers=auth("s1")).status_code == 403

    course = client.post("/api/courses", json={"name": "W101"}, headers=teacher)
    assert course.status_code == 201
    course_id = course.json()["id"]

    task = client.post(
        f"/api/courses/{course_id}/tasks",
        json={"prompt_text": "Describe the table.", "guidelines": "Be specific."},
        headers=teacher,
    )
    assert task.status_code == 201
    task_id = task.json()["id"]

    missing = client.post(
        "/api/courses/ghost/tasks", json={"prompt_text": "x"}, headers=teacher
    )
    assert missing.status_code == 404

    listing = client.get("/api/courses", headers=teacher)
    assert listing.status_code == 200
    [course_data] = listing.json()["courses"]
    assert course_data["name"] == "W101"
    assert [t["id"] for t in course_data["tasks"]] == [task_id]
    assert client.get("/api/courses", headers=auth("s1")).status_code == 403

    created = start_document(client, task_ref=task_id)
    view = client.get(
        f"/api/sessions/{created['session_id']}", headers=auth("student-1")
    ).json()
    assert view["task_ref"] == task_id

    ghost_task = client.post(
        "/api/documents",
        json={"text": "Fine.", **MODEL_BODY, "task_ref": "ghost"},
        headers=auth("student-1"),
    )
    assert ghost_task.status_code == 404


def test_report_flow(client):
    session_id = start_document(client)["session_id"]
    client.runtime.drain()

    denied = client.post(
        "/api/reports", json={"filter": {"session_ids": [session_id]}}, headers=auth("s1")
    )
    assert denied.status_code == 403

    accepted = client.post(
        "/api/reports",
        json={"filter": {"session_ids": [session_id]}},
        headers=auth("teacher-1", Role.TEACHER),
    )
    assert accepted.status_code == 202
    report_id = accepted.json()["report_id"]
    client.runtime.drain()

    download = client.get(
        f"/api/reports/{report_id}", headers=auth("res-1", Role.RESEARCHER)
    )
    assert download.status_code == 200
    assert download.headers["content-type"].startswith("text/csv")
    assert "attachment" in download.headers["content-disposition"]
    assert download.content.startswith(b"session_id,")

    assert (
        client.get(f"/api/reports/{report_id}", headers=auth("s1")).status_code == 403
    )
    assert (
        client.get("/api/reports/ghost", headers=auth("teacher-1", Role.TEACHER)).status_code
        == 404
    )


def test_bad_report_filter_produces_no_file(client):
    accepted = client.post(
        "/api/reports", json={"filter": {}}, headers=auth("teacher-1", Role.TEACHER)
    )
    assert accepted.status_code == 202
    client.runtime.drain()
    missing = client.get(
        f"/api/reports/{accepted.json()['report_id']}",
        headers=auth("teacher-1", Role.TEACHER),
    )
    assert missing.status_code == 404


def test_websocket_rejects_bad_token(client):
    from starlette.websockets import WebSocketDisconnect

    with pytest.raises(WebSocketDisconnect) as excinfo:
        with client.websocket_connect("/rt?token=garbage") as websocket:
            websocket.receive_json()
    assert excinfo.value.code == 4401


def test_websocket_delivers_buffered_events(client):
    session_id = start_document(client)["session_id"]
    client.runtime.drain()

    token = issue_token(SECRET, "student-1", Role.STUDENT, clock=lambda: FIXED_TIME)
    with client.websocket_connect(f"/rt?token={token}") as websocket:
        event = websocket.receive_json()
    assert event["kind"] == "hint_delivered"
    assert event["session_id"] == session_id
    assert event["sentence_index"] == 0
    assert event["body"]


def test_websocket_delivers_live_events(client):
    token = issue_token(SECRET, "student-1", Role.STUDENT, clock=lambda: FIXED_TIME)
    with client.websocket_connect(f"/rt?token={token}") as websocket:
        session_id = start_document(client)["session_id"]
        client.runtime.drain()
        first = websocket.receive_json()
        second = websocket.receive_json()
    kinds = {first["kind"], second["kind"]}
    assert kinds == {"hint_delivered", "sentence_completed"}
    assert {first["session_id"], second["session_id"]} == {session_id}
