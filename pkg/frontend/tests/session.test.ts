import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { loadSession, saveSession } from "../src/session.js";
import type { KeypointSetDoc, KeypointSetPut, TemplatePayload } from "../src/types.js";

/** In-memory stand-in implementing the serve API contract. */
class MockServer {
  template: TemplatePayload;
  doc: KeypointSetDoc;
  failNetwork = false;

  constructor() {
    const uv: [number, number][] = [];
    const indices: number[] = [];
    for (let k = 0; k < 100; k++) {
      indices.push(k);
      uv.push([(k % 10) / 10, Math.floor(k / 10) / 10]);
    }
    this.template = { vertexCount: 100, indices, uv };
    this.doc = {
      version: 1,
      templateVertexCount: 100,
      indices: [11, 22, 33, 44],
      mirror: [0, 1, 2, 3],
      provenance: ["seed-jaw", "seed-nose", "centroid-iter1", "manual"],
    };
  }

  private json(status: number, body: unknown): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    if (this.failNetwork) throw new TypeError("fetch failed");
    if (url.endsWith("/api/template")) return this.json(200, this.template);
    if (url.endsWith("/api/keypointset") && (!init || !init.method))
      return this.json(200, this.doc);
    if (url.endsWith("/api/keypointset") && init?.method === "PUT") {
      const body = JSON.parse(String(init.body)) as KeypointSetPut;
      if (body.version !== this.doc.version)
        return this.json(409, {
          error: { message: "stale version; reload", invariant: "version current" },
        });
      let indices = [...body.indices];
      if (body.uv) {
        body.uv.forEach((hint, k) => {
          if (!hint) return;
          let best = 0;
          let bestD2 = Infinity;
          this.template.uv.forEach((p, j) => {
            const d2 = (p[0] - hint[0]) ** 2 + (p[1] - hint[1]) ** 2;
            if (d2 < bestD2) {
              bestD2 = d2;
              best = this.template.indices[j]!;
            }
          });
          indices[k] = best;
        });
      }
      if (new Set(indices).size !== indices.length)
        return this.json(422, {
          error: {
            message: "keypoint indices must be unique",
            invariant: "indices unique",
          },
        });
      const oldTags = new Map(
        this.doc.indices.map((v, k) => [v, this.doc.provenance[k]!]));
      this.doc = {
        version: this.doc.version + 1,
        templateVertexCount: 100,
        indices,
        mirror: indices.map((_, k) => k),
        provenance: indices.map((v) => oldTags.get(v) ?? "manual"),
      };
      return this.json(200, this.doc);
    }
    return this.json(404, { error: { message: "no such resource" } });
  };

  client(): ApiClient {
    return new ApiClient("http://mock", this.fetch);
  }
}

test("loadSession assembles state and legend counts", async () => {
  const server = new MockServer();
  const session = await loadSession(server.client());
  assert.equal(session.state.points.length, 4);
  assert.equal(session.state.dirty, false);
  const counts = session.state.provenanceCounts();
  assert.equal(counts.get("seed-jaw"), 1);
  assert.equal(counts.get("manual"), 1);
  assert.deepEqual(session.state.points[0]!.uv, [0.1, 0.1]);
});

test("move -> save -> reload equals saved state", async () => {
  const server = new MockServer();
  const session = await loadSession(server.client());
  const moved = session.state.move(2, 55, [0.5, 0.5]);
  assert.ok(moved.ok);
  const outcome = await saveSession(server.client(), session);
  assert.equal(outcome.status, "saved");
  assert.equal(session.state.version, 2);
  assert.equal(session.state.dirty, false);
  assert.equal(session.state.points[2]!.vertex, 55);
  assert.equal(session.state.points[2]!.provenance, "manual");
  const reloaded = await loadSession(server.client());
  assert.deepEqual(
    reloaded.state.points.map((p) => [p.vertex, p.provenance]),
    session.state.points.map((p) => [p.vertex, p.provenance]),
  );
});

test("uv hints are re-snapped by the server", async () => {
  const server = new MockServer();
  const session = await loadSession(server.client());
  // hint near vertex 78's uv (0.8, 0.7)
  session.state.move(0, 99, [0.79, 0.71]);
  const outcome = await saveSession(server.client(), session);
  assert.equal(outcome.status, "saved");
  assert.equal(session.state.points[0]!.vertex, 78);
});

test("server 422 surfaces message and offending ordinal, state retained", async () => {
  const server = new MockServer();
  const session = await loadSession(server.client());
  // corrupt past the local guards, as a buggy client would
  session.state.points[1]!.vertex = session.state.points[0]!.vertex;
  const outcome = await saveSession(server.client(), session);
  assert.equal(outcome.status, "invalid");
  if (outcome.status === "invalid") {
    assert.match(outcome.message, /unique/);
    assert.equal(outcome.offendingOrdinal, 1);
  }
  assert.equal(session.state.points.length, 4); // nothing lost
});

test("stale version yields a reload prompt outcome", async () => {
  const server = new MockServer();
  const session = await loadSession(server.client());
  server.doc = { ...server.doc, version: 9 }; // someone else saved
  session.state.move(0, 60, [0.0, 0.6]);
  const outcome = await saveSession(server.client(), session);
  assert.equal(outcome.status, "stale");
  assert.equal(session.state.points[0]!.vertex, 60); // edits retained
  assert.equal(session.state.dirty, true);
});

test("network failure keeps edits and reports retriable", async () => {
  const server = new MockServer();
  const session = await loadSession(server.client());
  session.state.move(3, 77, [0.7, 0.7]);
  server.failNetwork = true;
  const outcome = await saveSession(server.client(), session);
  assert.equal(outcome.status, "network");
  assert.equal(session.state.dirty, true);
  server.failNetwork = false;
  const retry = await saveSession(server.client(), session);
  assert.equal(retry.status, "saved");
});

test("unreachable server rejects loadSession", async () => {
  const dead = new ApiClient("http://mock", async () => {
    throw new TypeError("fetch failed");
  });
  await assert.rejects(loadSession(dead));
});
