import io
import uuid
import zipfile
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from genreflux import SessionManager, SessionStore, create_app, replay
from tests.conftest import FlakyBackend

ANCHOR = "young woman, silver bob haircut"


def panel_body(keyword: str = "Rain", emoji: str = "🥀", box: dict | None = None) -> dict:
    return {
        "box": box or {"x": 0, "y": 0, "width": 1600, "height": 600},
        "strokes": {"polylines": [[[100, 100], [900, 400]]], "stroke_width": 3},
        "keyword": keyword,
        "emoji": emoji,
    }


@pytest.fixture
def service(tmp_path):
    manager = SessionManager(SessionStore(tmp_path / "sessions"))
    with TestClient(create_app(manager)) as client:
        yield manager, client


@pytest.fixture
def live_session(service):
    manager, client = service
    created = client.post("/sessions", json={"anchor": ANCHOR}).json()
    return manager, client, created["session_id"]


class TestCatalogEndpoints:
    def test_health(self, service):
        _, client = service
        body = client.get("/health").json()
        assert body["status"] == "ok"

    def test_config_reports_tuning_and_limits(self, service):
        _, client = service
        body = client.get("/config").json()
        assert body == {
            "decay": 0.8,
            "flux_threshold": 2.5,
            "beta_min": 1.0,
            "beta_max": 3.0,
            "max_side": 512,
            "panoramic_min": 1.8,
            "closeup_max": 0.67,
        }

    def test_vocab_listing(self, service):
        manager, client = service
        body = client.get("/vocab").json()
        keywords = [entry["keyword"] for entry in body["keywords"]]
        assert keywords == sorted(keywords)
        assert set(keywords) == set(manager.vocab.entries)
        rain = next(e for e in body["keywords"] if e["keyword"] == "Rain")
        assert set(rain) == {"keyword", "weights", "frequency", "scene_fragment"}

    def test_lexicon_listing(self, service):
        manager, client = service
        body = client.get("/lexicon").json()
        assert {e["emoji"] for e in body["emojis"]} == set(manager.lexicon.entries)


class TestSessionEndpoints:
    def test_create_returns_initial_state(self, service):
        _, client = service
        resp = client.post("/sessions", json={"anchor": ANCHOR})
        assert resp.status_code == 201
        body = resp.json()
        assert body["anchor"] == ANCHOR
        assert body["turn_index"] == 0
        assert body["active_genre"] is None
        assert body["state"] == {"romance": 0.0, "tragedy": 0.0, "chaos": 0.0, "mystery": 0.0}
        assert len(body["history"]) == 1
        assert body["canvas"] == [1600, 1200]

    def test_empty_anchor_rejected(self, service):
        _, client = service
        resp = client.post("/sessions", json={"anchor": "   "})
        assert resp.status_code == 400

    def test_config_override_visible_in_state(self, service):
        _, client = service
        created = client.post(
            "/sessions", json={"anchor": ANCHOR, "config": {"decay": 0.5}}
        ).json()
        state = client.get(f"/sessions/{created['session_id']}/state").json()
        assert state["config"]["decay"] == 0.5
        assert state["config"]["flux_threshold"] == 2.5

    def test_custom_canvas(self, service):
        _, client = service
        created = client.post(
            "/sessions", json={"anchor": ANCHOR, "canvas": [800, 600]}
        ).json()
        assert created["canvas"] == [800, 600]
        # a box sized for the default canvas no longer fits
        resp = client.post(
            f"/sessions/{created['session_id']}/panels", json=panel_body()
        )
        assert resp.status_code == 422

    def test_unknown_session_is_404(self, service):
        _, client = service
        assert client.get(f"/sessions/{uuid.uuid4()}/state").status_code == 404

    def test_malformed_session_id_is_422(self, service):
        _, client = service
        assert client.get("/sessions/not-a-uuid/state").status_code == 422


class TestPanelTurns:
    def test_turn_response_contract(self, live_session):
        manager, client, sid = live_session
        resp = client.post(f"/sessions/{sid}/panels", json=panel_body())
        assert resp.status_code == 200
        body = resp.json()
        assert body["turn_index"] == 1
        assert body["regeneration_counter"] == 0
        assert body["image_name"] == "01_00.png"
        assert body["image"] == f"/sessions/{sid}/images/01_00.png"
        assert body["prompt_preview"].startswith(ANCHOR)
        assert isinstance(body["flux_triggered_this_turn"], bool)
        assert body["backend_id"] == "mock"
        # panoramic 1600x600 box snaps to 512x192
        assert (body["width"], body["height"]) == (512, 192)

    def test_turn_state_matches_engine_replay(self, live_session):
        manager, client, sid = live_session
        turns = [("Rain", "🥀"), ("Rain", "🥀"), ("Gunshot", "🥀")]
        last = None
        for keyword, emoji in turns:
            last = client.post(
                f"/sessions/{sid}/panels", json=panel_body(keyword, emoji)
            ).json()
        events = manager.store.read_events(uuid.UUID(sid))
        oracle = replay(
            events, manager.lexicon, manager.vocab, manager.session_meta(uuid.UUID(sid)).config
        )
        assert last["state"] == oracle.current.as_dict()
        expected_genre = oracle.active_genre.value if oracle.active_genre else None
        assert last["active_genre"] == expected_genre
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["turn_index"] == 3
        assert state["state"] == last["state"]
        assert state["history"][-1]["state"] == last["state"]

    def test_image_is_served_at_reported_url(self, live_session):
        _, client, sid = live_session
        body = client.post(f"/sessions/{sid}/panels", json=panel_body()).json()
        resp = client.get(body["image"])
        assert resp.status_code == 200
        assert resp.headers["content-type"] == "image/png"
        with Image.open(io.BytesIO(resp.content)) as img:
            assert img.size == (body["width"], body["height"])

    def test_unknown_keyword_rejected_without_consuming_turn(self, live_session):
        _, client, sid = live_session
        resp = client.post(f"/sessions/{sid}/panels", json=panel_body(keyword="Spaceship"))
        assert resp.status_code == 422
        assert client.get(f"/sessions/{sid}/state").json()["turn_index"] == 0

    def test_unknown_emoji_rejected(self, live_session):
        _, client, sid = live_session
        assert (
            client.post(f"/sessions/{sid}/panels", json=panel_body(emoji="🤡")).status_code
            == 422
        )

    def test_box_outside_canvas_rejected(self, live_session):
        _, client, sid = live_session
        bad = panel_body(box={"x": 200, "y": 0, "width": 1500, "height": 600})
        assert client.post(f"/sessions/{sid}/panels", json=bad).status_code == 422

    def test_strokes_outside_box_rejected(self, live_session):
        _, client, sid = live_session
        body = panel_body()
        body["strokes"]["polylines"] = [[[100, 100], [1700, 400]]]
        assert client.post(f"/sessions/{sid}/panels", json=body).status_code == 422

    def test_panel_for_unknown_session_is_404(self, service):
        _, client = service
        assert (
            client.post(f"/sessions/{uuid.uuid4()}/panels", json=panel_body()).status_code
            == 404
        )


class TestRegeneration:
    def test_regenerate_rerolls_without_moving_state(self, live_session):
        _, client, sid = live_session
        first = client.post(f"/sessions/{sid}/panels", json=panel_body()).json()
        regen = client.post(f"/sessions/{sid}/panels/1/regenerate").json()
        assert regen["turn_index"] == 1
        assert regen["regeneration_counter"] == 1
        assert regen["image_name"] == "01_01.png"
        assert regen["flux_triggered_this_turn"] is False
        assert regen["state"] == first["state"]
        assert regen["request_digest"] != first["request_digest"]
        assert client.get(f"/sessions/{sid}/state").json()["turn_index"] == 1
        # both images remain fetchable
        assert client.get(first["image"]).status_code == 200
        assert client.get(regen["image"]).status_code == 200

    def test_regenerate_missing_turn_is_404(self, live_session):
        _, client, sid = live_session
        assert client.post(f"/sessions/{sid}/panels/1/regenerate").status_code == 404
        client.post(f"/sessions/{sid}/panels", json=panel_body())
        assert client.post(f"/sessions/{sid}/panels/2/regenerate").status_code == 404


class TestImages:
    def test_nonexistent_image_is_404(self, live_session):
        _, client, sid = live_session
        assert client.get(f"/sessions/{sid}/images/01_00.png").status_code == 404

    def test_non_panel_names_are_404(self, live_session):
        _, client, sid = live_session
        client.post(f"/sessions/{sid}/panels", json=panel_body())
        for name in ("meta.json", "1_0.png", "01_00.jpg", "..meta.json"):
            assert client.get(f"/sessions/{sid}/images/{name}").status_code == 404


class TestAtomicity:
    def test_backend_failure_is_502_and_preserves_the_turn(self, tmp_path):
        backend = FlakyBackend(failures=1)
        manager = SessionManager(SessionStore(tmp_path / "sessions"), backend=backend)
        with TestClient(create_app(manager)) as client:
            sid = client.post("/sessions", json={"anchor": ANCHOR}).json()["session_id"]
            failed = client.post(f"/sessions/{sid}/panels", json=panel_body())
            assert failed.status_code == 502
            assert client.get(f"/sessions/{sid}/state").json()["turn_index"] == 0
            assert manager.store.read_events(uuid.UUID(sid)) == []
            # the retry consumes the turn the failure did not
            retried = client.post(f"/sessions/{sid}/panels", json=panel_body())
            assert retried.status_code == 200
            assert retried.json()["turn_index"] == 1
            assert len(manager.store.read_events(uuid.UUID(sid))) == 1

    def test_failed_regeneration_leaves_log_unchanged(self, tmp_path):
        backend = FlakyBackend(failures=0)
        manager = SessionManager(SessionStore(tmp_path / "sessions"), backend=backend)
        with TestClient(create_app(manager)) as client:
            sid = client.post("/sessions", json={"anchor": ANCHOR}).json()["session_id"]
            client.post(f"/sessions/{sid}/panels", json=panel_body())
            backend.remaining = 1
            assert client.post(f"/sessions/{sid}/panels/1/regenerate").status_code == 502
            assert len(manager.store.read_events(uuid.UUID(sid))) == 1
            regen = client.post(f"/sessions/{sid}/panels/1/regenerate")
            assert regen.status_code == 200
            assert regen.json()["regeneration_counter"] == 1


class TestConcurrency:
    def test_parallel_posts_serialize_per_session(self, live_session):
        _, client, sid = live_session

        def submit(_):
            return client.post(f"/sessions/{sid}/panels", json=panel_body())

        with ThreadPoolExecutor(max_workers=8) as pool:
            responses = list(pool.map(submit, range(8)))
        assert all(r.status_code == 200 for r in responses)
        assert sorted(r.json()["turn_index"] for r in responses) == list(range(1, 9))
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["turn_index"] == 8
        assert len(state["history"]) == 9


class TestExport:
    def build_comic(self, client, sid, turns=3):
        for _ in range(turns):
            client.post(f"/sessions/{sid}/panels", json=panel_body())

    def test_zip_contents(self, live_session):
        _, client, sid = live_session
        self.build_comic(client, sid)
        resp = client.get(f"/sessions/{sid}/export")
        assert resp.status_code == 200
        assert resp.headers["content-type"] == "application/zip"
        assert f"comic_{sid}.zip" in resp.headers["content-disposition"]
        with zipfile.ZipFile(io.BytesIO(resp.content)) as zf:
            assert sorted(zf.namelist()) == [
                "manifest.json",
                "panel_01.png",
                "panel_02.png",
                "panel_03.png",
            ]

    def test_repeated_export_is_byte_identical(self, live_session):
        _, client, sid = live_session
        self.build_comic(client, sid)
        first = client.get(f"/sessions/{sid}/export").content
        second = client.get(f"/sessions/{sid}/export").content
        assert first == second

    def test_export_reflects_regenerations(self, live_session):
        _, client, sid = live_session
        self.build_comic(client, sid, turns=2)
        before = client.get(f"/sessions/{sid}/export").content
        regen = client.post(f"/sessions/{sid}/panels/2/regenerate").json()
        after = client.get(f"/sessions/{sid}/export").content
        assert before != after
        with zipfile.ZipFile(io.BytesIO(after)) as zf:
            regen_png = client.get(regen["image"]).content
            assert zf.read("panel_02.png") == regen_png

    def test_export_of_empty_session_is_409(self, live_session):
        _, client, sid = live_session
        assert client.get(f"/sessions/{sid}/export").status_code == 409


class TestRestartRecovery:
    def test_sessions_survive_a_manager_restart(self, tmp_path):
        root = tmp_path / "sessions"
        manager_a = SessionManager(SessionStore(root))
        with TestClient(create_app(manager_a)) as client_a:
            sid = client_a.post("/sessions", json={"anchor": ANCHOR}).json()["session_id"]
            client_a.post(f"/sessions/{sid}/panels", json=panel_body())
            last = client_a.post(f"/sessions/{sid}/panels", json=panel_body()).json()

        manager_b = SessionManager(SessionStore(root))
        with TestClient(create_app(manager_b)) as client_b:
            state = client_b.get(f"/sessions/{sid}/state").json()
            assert state["turn_index"] == 2
            assert state["state"] == last["state"]
            assert state["anchor"] == ANCHOR
            resumed = client_b.post(f"/sessions/{sid}/panels", json=panel_body())
            assert resumed.json()["turn_index"] == 3
            assert client_b.get(last["image"]).status_code == 200


class TestUiMount:
    def test_static_ui_served_when_present(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>flux-ui</body></html>")
        manager = SessionManager(SessionStore(tmp_path / "sessions"))
        with TestClient(create_app(manager, ui_dir=ui)) as client:
            resp = client.get("/ui/")
            assert resp.status_code == 200
            assert "flux-ui" in resp.text

    def test_no_mount_without_ui_dir(self, service):
        _, client = service
        assert client.get("/ui/").status_code == 404
