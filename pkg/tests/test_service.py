import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from conftest import LOO_FOREST, SMALL_FOREST, build_small_loo
from xmtc import store
from xmtc.data_io import save_dataset, synthesize, SynthConfig
from xmtc.service import create_app

GOLDEN = Path(__file__).resolve().parent / "golden"

SWEEP_ID = "synth-4c-11-s10-t20-r3"


def golden(name: str):
    return json.loads((GOLDEN / name).read_text())


@pytest.fixture(scope="module")
def api_root(tmp_path_factory, small_dataset, small_sweep):
    root = tmp_path_factory.mktemp("api")
    save_dataset(small_dataset, root / "dataset")
    sweep_dir = root / "sweeps" / SWEEP_ID
    store.save_sweep(small_sweep, sweep_dir)
    store.save_loo(build_small_loo(small_dataset), sweep_dir)
    # a second sweep directory under a free-form name, without a
    # leave-one-out result
    store.save_sweep(small_sweep, root / "sweeps" / "scratch")
    return root


@pytest.fixture(scope="module")
def client(api_root):
    return TestClient(create_app(api_root))


# ---------------------------------------------------------------------------
# read endpoints against the golden fixtures


def test_datasets_listing(client):
    assert client.get("/api/datasets").json() == golden("datasets.json")


def test_sweeps_listing(client):
    listing = client.get("/api/sweeps").json()
    by_id = {s["id"]: s for s in listing}
    assert set(by_id) == {SWEEP_ID, "scratch"}
    assert by_id[SWEEP_ID] in golden("sweeps.json")
    assert by_id["scratch"]["has_loo"] is False
    assert by_id["scratch"]["dataset_id"] == "synth-4c-11"


def test_curve(client):
    payload = client.get(f"/api/sweeps/{SWEEP_ID}/curve").json()
    assert payload == golden("curve.json")
    assert len(payload["accuracy"]) == len(payload["windows"])
    assert payload["windows"] == list(range(10, 71, 10))


def test_confusion(client):
    for window, name in ((20, "confusion_w20.json"), (70, "confusion_w70.json")):
        payload = client.get(f"/api/sweeps/{SWEEP_ID}/confusion/{window}").json()
        assert payload == golden(name)
        # every row sums to the class's test-series count
        assert [sum(row) for row in payload["counts"]] == [2, 2, 2, 2]


def test_confusion_accuracy_matches_curve(client):
    curve = client.get(f"/api/sweeps/{SWEEP_ID}/curve").json()
    for wi, window in enumerate(curve["windows"]):
        cm = client.get(f"/api/sweeps/{SWEEP_ID}/confusion/{window}").json()
        assert cm["accuracy"] == curve["accuracy"][wi]


def test_series(client):
    payload = client.get(f"/api/sweeps/{SWEEP_ID}/series").json()
    assert payload == golden("series.json")
    assert sum(1 for m in payload if m["split"] == "test") == 8


def test_temporal(client):
    fixture = golden("temporal.json")
    sid = fixture["series_id"]
    payload = client.get(f"/api/sweeps/{SWEEP_ID}/series/{sid}/temporal").json()
    assert payload == fixture
    for col in zip(*payload["probs"]):
        assert sum(col) == pytest.approx(1.0, abs=1e-12)


def test_temporal_rejects_non_test_series(client):
    train_ids = [
        m["id"]
        for m in client.get(f"/api/sweeps/{SWEEP_ID}/series").json()
        if m["split"] == "train"
    ]
    r = client.get(f"/api/sweeps/{SWEEP_ID}/series/{train_ids[0]}/temporal")
    assert r.status_code == 404
    assert client.get(f"/api/sweeps/{SWEEP_ID}/series/zzz/temporal").status_code == 404


def test_pdp_lazy_compute_and_cache(client, api_root):
    cache = store.pdp_path(api_root / "sweeps" / SWEEP_ID, 20, 5)
    assert not cache.is_file()
    payload = client.get(f"/api/sweeps/{SWEEP_ID}/pdp/20?grid=5").json()
    assert payload == golden("pdp_w20_g5.json")
    assert cache.is_file()
    # the second call serves the cached surface, byte-identically
    assert client.get(f"/api/sweeps/{SWEEP_ID}/pdp/20?grid=5").json() == payload
    for channel_curves in payload["curves"]:
        for point in zip(*channel_curves):
            assert sum(point) == pytest.approx(1.0, abs=1e-12)


def test_pdp_validation(client):
    assert client.get(f"/api/sweeps/{SWEEP_ID}/pdp/20?grid=1").status_code == 400
    assert client.get(f"/api/sweeps/{SWEEP_ID}/pdp/20?grid=202").status_code == 400
    r = client.get(f"/api/sweeps/{SWEEP_ID}/pdp/33?grid=5")
    assert r.status_code == 404
    assert "not on the sweep grid" in r.json()["detail"]


def test_loo(client):
    payload = client.get(f"/api/sweeps/{SWEEP_ID}/loo").json()
    assert payload == golden("loo.json")
    assert [f["group"] for f in payload["folds"]] == ["u00", "u01", "u02"]
    for fold in payload["folds"]:
        assert fold["group"] not in fold["train_groups"]


def test_loo_missing_is_404(client):
    r = client.get("/api/sweeps/scratch/loo")
    assert r.status_code == 404
    assert "no leave-one-out result" in r.json()["detail"]


def test_unknown_ids_are_404(client):
    assert client.get("/api/sweeps/nope/curve").status_code == 404
    assert client.get("/api/jobs/nope").status_code == 404
    assert client.post("/api/datasets/nope/sweeps", json={}).status_code == 404


# ---------------------------------------------------------------------------
# sweep training jobs


def _wait_for(client, job_id, timeout=120.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        job = client.get(f"/api/jobs/{job_id}").json()
        if job["phase"] in ("done", "failed"):
            return job
        time.sleep(0.05)
    raise AssertionError(f"job {job_id} did not finish within {timeout}s")


def test_post_sweep_lifecycle(client, api_root):
    r = client.post(
        "/api/datasets/synth-4c-11/sweeps",
        json={"n_trees": 3, "seed": 7, "step": 20},
    )
    assert r.status_code == 202
    body = r.json()
    assert body["sweep_id"] == "synth-4c-11-s20-t3-r7"
    job = _wait_for(client, body["job_id"])
    assert job["phase"] == "done", job["error"]
    assert job["progress"] == 1.0
    assert (api_root / "sweeps" / body["sweep_id"] / "sweep.json").is_file()
    curve = client.get(f"/api/sweeps/{body['sweep_id']}/curve").json()
    assert curve["windows"] == [10, 30, 50, 70]
    assert curve["n_trees"] == 3
    # an identical request now collides with the stored sweep
    r = client.post(
        "/api/datasets/synth-4c-11/sweeps",
        json={"n_trees": 3, "seed": 7, "step": 20},
    )
    assert r.status_code == 409
    assert r.json()["detail"]["sweep_id"] == body["sweep_id"]


def test_post_sweep_single_writer_per_dataset(client):
    r1 = client.post(
        "/api/datasets/synth-4c-11/sweeps", json={"n_trees": 40, "seed": 8}
    )
    assert r1.status_code == 202
    r2 = client.post(
        "/api/datasets/synth-4c-11/sweeps", json={"n_trees": 40, "seed": 9}
    )
    assert r2.status_code == 409
    assert r2.json()["detail"]["job_id"] == r1.json()["job_id"]
    job = _wait_for(client, r1.json()["job_id"])
    assert job["phase"] == "done", job["error"]


@pytest.mark.parametrize(
    "body",
    [
        {"n_trees": 0},
        {"n_trees": True},
        {"seed": -1},
        {"step": 0},
        {"step": "ten"},
        {"banana": 1},
    ],
)
def test_post_sweep_validation(client, body):
    r = client.post("/api/datasets/synth-4c-11/sweeps", json=body)
    assert r.status_code == 400


def test_post_sweep_rejects_non_object_body(client):
    r = client.post(
        "/api/datasets/synth-4c-11/sweeps",
        content=b"[1, 2]",
        headers={"content-type": "application/json"},
    )
    assert r.status_code == 400
    r = client.post(
        "/api/datasets/synth-4c-11/sweeps",
        content=b"not json",
        headers={"content-type": "application/json"},
    )
    assert r.status_code == 400


def test_post_sweep_requires_test_split(tmp_path):
    root = tmp_path
    dataset = synthesize(
        SynthConfig(
            n_objects=1,
            series_per_class=4,
            min_length=30,
            max_length=40,
            t_side=5,
            t_obj=15,
            n_groups=2,
            seed=1,
        )
    )
    save_dataset(dataset, root / "ds")
    client = TestClient(create_app(root))
    r = client.post(f"/api/datasets/{dataset.dataset_id}/sweeps", json={})
    assert r.status_code == 400
    assert "no test split" in r.json()["detail"]


# ---------------------------------------------------------------------------
# restarts and the bare root


def test_restart_serves_identical_payloads(client, api_root):
    fresh = TestClient(create_app(api_root))
    for url in (
        "/api/datasets",
        "/api/sweeps",
        f"/api/sweeps/{SWEEP_ID}/curve",
        f"/api/sweeps/{SWEEP_ID}/confusion/70",
        f"/api/sweeps/{SWEEP_ID}/series",
        f"/api/sweeps/{SWEEP_ID}/pdp/20?grid=5",
        f"/api/sweeps/{SWEEP_ID}/loo",
    ):
        assert fresh.get(url).json() == client.get(url).json(), url


def test_root_reports_service_info_without_ui(api_root, monkeypatch):
    monkeypatch.setenv("XMTC_UI_DIR", str(api_root / "no-such-dir"))
    client = TestClient(create_app(api_root))
    r = client.get("/")
    assert r.status_code == 200
    assert "/api/datasets" in json.dumps(r.json())


def test_create_app_rejects_missing_dir(tmp_path):
    with pytest.raises(ValueError, match="not a directory"):
        create_app(tmp_path / "nope")
