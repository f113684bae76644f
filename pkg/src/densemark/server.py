"""Loopback HTTP/JSON API backing the keypoint rectification UI.

Endpoints:
  GET  /api/template          vertex UVs, decimated to <= 10k points,
                              with their true vertex indices
  GET  /api/keypointset       current keypoint set JSON
  PUT  /api/keypointset       replace the set; optimistic version check,
                              optional per-entry uv re-snap, invariants
                              enforced (422 names the violated invariant),
                              previous file kept as a timestamped backup
  GET  /api/preview/<id>      landmark tensors for a manifest sample

Single-operator tool: no auth, binds loopback by default, writes are
serialized by a lock, and every accepted PUT bumps the version counter so
stale clients get 409 and a reload prompt. Permissive CORS headers let a
dev-served UI talk to it.
"""

import json
import os
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from . import kernels, npyio
from .dataset import load_manifest
from .errors import DensemarkError, ParseError, StaleVersionError, \
    ValidationError
from .geom import KeypointSet

TEMPLATE_TRANSPORT_LIMIT = 10000


def decimate_template(mesh, limit=TEMPLATE_TRANSPORT_LIMIT):
    """Evenly strided subset of vertex UVs for transport, with indices."""
    n = mesh.vertex_count
    if n <= limit:
        idx = np.arange(n, dtype=np.int64)
    else:
        stride = -(-n // limit)  # ceil
        idx = np.arange(0, n, stride, dtype=np.int64)
    return {
        "vertexCount": int(n),
        "indices": [int(i) for i in idx],
        "uv": [[float(u), float(v)] for u, v in mesh.uv[idx]],
    }


class KeypointStore:
    """Versioned keypoint-set file with backups and single-writer updates."""

    def __init__(self, path, mesh):
        self.path = str(path)
        self.mesh = mesh
        self.lock = threading.Lock()

    def get(self):
        return KeypointSet.load(self.path)

    def _backup(self, current):
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        backup = f"{self.path}.v{current.version}.{stamp}.bak"
        with open(backup, "w", encoding="utf-8") as fh:
            fh.write(current.to_json())
        return backup

    def put(self, doc):
        """Validate and persist an edited set; returns the stored set.

        ``doc`` is keypoint-set JSON, optionally extended with "uv": a
        per-entry list of [u,v] or null. Entries carrying a uv are
        authoritatively re-snapped to the nearest template vertex.
        Vertices not present in the stored set get provenance "manual";
        when the index sequence changed at all, the mirror table is
        rebuilt from UV geometry (it is derived data).
        """
        with self.lock:
            current = self.get()
            if "version" not in doc:
                raise ValidationError("missing version field",
                                      invariant="version present")
            if int(doc["version"]) != current.version:
                raise StaleVersionError(
                    f"stale version {doc['version']} (server has "
                    f"{current.version}); reload and retry",
                    invariant="version current")

            indices = [int(i) for i in doc.get("indices", [])]
            uv_hints = doc.get("uv")
            if uv_hints is not None:
                if len(uv_hints) != len(indices):
                    raise ValidationError("uv hint list length mismatch",
                                          invariant="uv hints length")
                hinted = [k for k, uv in enumerate(uv_hints)
                          if uv is not None]
                if hinted:
                    pts = np.asarray([uv_hints[k] for k in hinted],
                                     dtype=np.float64)
                    snapped = kernels.nearest_vertices(pts, self.mesh.uv)
                    for k, vtx in zip(hinted, snapped):
                        indices[k] = int(vtx)

            stored_tags = {int(v): tag for v, tag in
                           zip(current.indices, current.provenance)}
            provenance = tuple(stored_tags.get(v, "manual") for v in indices)

            unchanged = indices == [int(v) for v in current.indices]
            if unchanged and doc.get("mirror") is not None:
                mirror = np.asarray(doc["mirror"], dtype=np.int64)
            elif unchanged:
                mirror = current.mirror
            else:
                mirror = None  # rebuilt below

            candidate = KeypointSet(
                indices=np.asarray(indices, dtype=np.int64),
                mirror=mirror,
                provenance=provenance,
                template_vertex_count=current.template_vertex_count,
                version=current.version + 1,
            )
            if not unchanged and indices:
                from .sampler import build_mirror_table
                candidate = build_mirror_table(candidate, self.mesh)
            self._backup(current)
            tmp = self.path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(candidate.to_json())
            os.replace(tmp, self.path)
            return candidate


class _Handler(BaseHTTPRequestHandler):
    server_version = "densemark"

    def log_message(self, fmt, *args):  # quiet; diagnostics go to stderr
        pass

    def _send_json(self, status, payload):
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status, message, invariant=None):
        doc = {"error": {"message": str(message)}}
        if invariant:
            doc["error"]["invariant"] = invariant
        self._send_json(status, doc)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        ctx = self.server.ctx
        try:
            if self.path == "/api/template":
                self._send_json(200, ctx["template_payload"])
            elif self.path == "/api/keypointset":
                self._send_json(200, ctx["store"].get().to_json_dict())
            elif self.path.startswith("/api/preview/"):
                sample_id = self.path[len("/api/preview/"):]
                self._preview(sample_id)
            elif ctx.get("ui_dir"):
                self._static(ctx["ui_dir"])
            else:
                self._send_error(404, f"no such resource: {self.path}")
        except DensemarkError as exc:
            self._send_error(422, exc)
        except Exception as exc:  # pragma: no cover - defensive
            self._send_error(500, exc)

    _CONTENT_TYPES = {".html": "text/html", ".js": "text/javascript",
                      ".css": "text/css", ".map": "application/json",
                      ".json": "application/json", ".svg": "image/svg+xml"}

    def _static(self, ui_dir):
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = os.path.realpath(os.path.join(ui_dir, rel))
        if not target.startswith(os.path.realpath(ui_dir) + os.sep) \
                and target != os.path.realpath(ui_dir):
            self._send_error(404, "not found")
            return
        if os.path.isdir(target):
            target = os.path.join(target, "index.html")
        if not os.path.isfile(target):
            self._send_error(404, f"no such file: {rel}")
            return
        with open(target, "rb") as fh:
            body = fh.read()
        ext = os.path.splitext(target)[1]
        self.send_response(200)
        self.send_header("Content-Type",
                         self._CONTENT_TYPES.get(ext, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _preview(self, sample_id):
        ctx = self.server.ctx
        records = ctx.get("manifest_index") or {}
        if sample_id not in records:
            self._send_error(404, f"unknown sample id: {sample_id}")
            return
        rec = records[sample_id]
        base = os.path.dirname(ctx["manifest_path"])
        payload = {"id": sample_id, "yaw": rec.get("yaw"),
                   "flipped": rec.get("flipped", False)}
        for key in ("lmk520", "lmk68"):
            if rec.get(key):
                arr = npyio.load_landmarks(os.path.join(base, rec[key]))
                payload[key] = arr.tolist()
        self._send_json(200, payload)

    def do_PUT(self):
        if self.path != "/api/keypointset":
            self._send_error(404, f"no such resource: {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            doc = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, json.JSONDecodeError) as exc:
            self._send_error(400, f"bad JSON body: {exc}")
            return
        try:
            stored = self.server.ctx["store"].put(doc)
        except StaleVersionError as exc:
            self._send_error(409, exc, invariant=exc.invariant)
            return
        except ValidationError as exc:
            self._send_error(422, exc, invariant=exc.invariant)
            return
        except ParseError as exc:
            self._send_error(400, exc)
            return
        self._send_json(200, stored.to_json_dict())


def make_server(mesh, keypoint_path, host="127.0.0.1", port=0,
                manifest_path=None, ui_dir=None):
    """Configured ThreadingHTTPServer; caller runs serve_forever()."""
    store = KeypointStore(keypoint_path, mesh)
    store.get()  # fail fast if unreadable
    ctx = {
        "store": store,
        "template_payload": decimate_template(mesh),
        "manifest_path": manifest_path,
        "manifest_index": None,
        "ui_dir": ui_dir,
    }
    if manifest_path:
        ctx["manifest_index"] = {r["id"]: r
                                 for r in load_manifest(manifest_path)}
    httpd = ThreadingHTTPServer((host, port), _Handler)
    httpd.ctx = ctx
    return httpd
