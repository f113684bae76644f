/**
 * Round trip against the real densemark serve process. Skipped when the
 * CLI is not on PATH (pure-frontend environments).
 */

import assert from "node:assert/strict";
import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { loadSession, saveSession, snapForEdit } from "../src/session.js";

const haveCli = spawnSync("densemark", ["--help"], { stdio: "ignore" })
  .status === 0;

async function waitForApi(base: string, tries = 50): Promise<void> {
  for (let k = 0; k < tries; k++) {
    try {
      const resp = await fetch(base + "/api/keypointset");
      if (resp.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("serve API did not come up");
}

test("live round trip: load, move, save, reload", { skip: !haveCli,
                                                    timeout: 120000 },
  async () => {
    const dir = mkdtempSync(join(tmpdir(), "densemark-ui-"));
    const keyfile = join(dir, "keypoints.json");
    const sampled = spawnSync(
      "densemark",
      ["sample", "--out", keyfile, "--target", "520"],
      { stdio: "ignore" },
    );
    assert.equal(sampled.status, 0);

    const port = 18000 + Math.floor(Math.random() * 2000);
    const server = spawn(
      "densemark",
      ["serve", "--keys", keyfile, "--port", String(port)],
      { stdio: "ignore" },
    );
    const base = `http://127.0.0.1:${port}`;
    try {
      await waitForApi(base);
      const api = new ApiClient(base);
      const session = await loadSession(api);
      assert.equal(session.state.points.length, 520);
      assert.equal(session.state.dirty, false);

      // drag ordinal 3 near the face centre; client snap picks the vertex
      const snap = snapForEdit(session, 0.515, 0.505);
      let target = snap;
      if (session.state.points.some((p) => p.vertex === snap.vertex)) {
        target = snapForEdit(session, 0.517, 0.493);
      }
      const moved = session.state.move(3, target.vertex, target.uv);
      assert.ok(moved.ok);
      const outcome = await saveSession(api, session);
      assert.equal(outcome.status, "saved");
      assert.equal(session.state.points[3]!.provenance, "manual");

      const reloaded = await loadSession(api);
      assert.deepEqual(
        reloaded.state.points.map((p) => [p.vertex, p.provenance]),
        session.state.points.map((p) => [p.vertex, p.provenance]),
      );
      assert.equal(reloaded.state.version, session.state.version);

      // a payload corrupted past the client guards must surface the
      // server's invariant message
      reloaded.state.points[1]!.vertex = reloaded.state.points[0]!.vertex;
      const rejected = await saveSession(api, reloaded);
      assert.equal(rejected.status, "invalid");
      if (rejected.status === "invalid") {
        assert.match(rejected.message, /unique/);
        assert.equal(rejected.offendingOrdinal, 1);
      }
    } finally {
      server.kill();
    }
  });
