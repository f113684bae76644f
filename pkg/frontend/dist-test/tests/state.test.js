import assert from "node:assert/strict";
import { test } from "node:test";
import { EditorState } from "../src/state.js";
function doc(indices, provenance) {
    return {
        version: 3,
        templateVertexCount: 1000,
        indices,
        mirror: indices.map((_, k) => k),
        provenance: provenance ?? indices.map(() => "manual"),
    };
}
const uvOf = (vertex) => [(vertex % 100) / 100, Math.floor(vertex / 100) / 100];
function freshState(n = 12) {
    const indices = Array.from({ length: n }, (_, k) => k * 7);
    return EditorState.fromServer(doc(indices), uvOf);
}
/** deterministic PRNG for the random edit scripts */
function mulberry32(seed) {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) >>> 0;
        let t = a;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}
test("fresh state is clean and empty-history", () => {
    const state = freshState();
    assert.equal(state.dirty, false);
    assert.equal(state.canUndo, false);
    assert.equal(state.canRedo, false);
});
test("move marks dirty, manual provenance, undo restores exactly", () => {
    const state = freshState();
    const before = state.stateKey();
    const result = state.move(2, 500, [0.5, 0.5]);
    assert.ok(result.ok);
    assert.equal(state.dirty, true);
    assert.equal(state.points[2].provenance, "manual");
    assert.equal(state.points[2].vertex, 500);
    assert.ok(state.undo());
    assert.equal(state.stateKey(), before);
    assert.equal(state.dirty, false);
    assert.ok(state.redo());
    assert.equal(state.points[2].vertex, 500);
});
test("duplicate add rejected inline without history pollution", () => {
    const state = freshState();
    const result = state.add(7, [0.07, 0]);
    assert.equal(result.ok, false);
    if (!result.ok)
        assert.match(result.reason, /already used/);
    assert.equal(state.canUndo, false);
    assert.equal(state.dirty, false);
});
test("move onto an occupied vertex rejected", () => {
    const state = freshState();
    const result = state.move(0, 7, [0.07, 0]);
    assert.equal(result.ok, false);
});
test("delete with no selection is a hinting no-op", () => {
    const state = freshState();
    state.select(null);
    const result = state.remove();
    assert.equal(result.ok, false);
    if (!result.ok)
        assert.match(result.reason, /select/i);
    assert.equal(state.points.length, 12);
});
test("delete removes selected and is undoable", () => {
    const state = freshState();
    state.select(4);
    assert.ok(state.remove().ok);
    assert.equal(state.points.length, 11);
    state.undo();
    assert.equal(state.points.length, 12);
    assert.equal(state.points[4].vertex, 28);
});
test("vertex outside the template rejected", () => {
    const state = freshState();
    assert.equal(state.add(5000, [0, 0]).ok, false);
    assert.equal(state.move(0, -1, [0, 0]).ok, false);
});
test("put body carries uv hints and drops stale mirror after edits", () => {
    const state = freshState();
    const clean = state.toPutBody();
    assert.ok(clean.mirror);
    assert.equal(clean.uv, undefined);
    state.move(1, 501, [0.01, 0.05]);
    const edited = state.toPutBody();
    assert.equal(edited.mirror, undefined);
    assert.ok(edited.uv);
    assert.deepEqual(edited.uv[1], [0.01, 0.05]);
    assert.equal(edited.uv[0], null);
    assert.equal(edited.version, 3);
});
test("markSaved clears dirty and resets hints", () => {
    const state = freshState();
    state.move(0, 900, [0.0, 0.09]);
    assert.equal(state.dirty, true);
    state.markSaved(4);
    assert.equal(state.dirty, false);
    assert.equal(state.version, 4);
    assert.equal(state.points[0].uvHint, null);
});
test("random 100-edit scripts survive undo/redo losslessly", () => {
    for (const seed of [1, 2, 3, 4, 5]) {
        const rng = mulberry32(seed);
        const state = freshState(20);
        const keys = [state.stateKey()];
        let applied = 0;
        while (applied < 100) {
            const roll = rng();
            let result;
            if (roll < 0.4 && state.points.length > 0) {
                const ordinal = Math.floor(rng() * state.points.length);
                const vertex = Math.floor(rng() * 1000);
                result = state.move(ordinal, vertex, uvOf(vertex));
            }
            else if (roll < 0.7) {
                const vertex = Math.floor(rng() * 1000);
                result = state.add(vertex, uvOf(vertex));
            }
            else if (roll < 0.9 && state.points.length > 1) {
                state.select(Math.floor(rng() * state.points.length));
                result = state.remove();
            }
            else {
                state.select(state.points.length ? Math.floor(rng() * state.points.length) : null);
                continue; // selection is not an undoable edit
            }
            if (!result.ok)
                continue; // inline rejection, state untouched
            keys.push(state.stateKey());
            applied++;
        }
        // unwind completely, checking every intermediate state
        for (let k = keys.length - 1; k > 0; k--) {
            assert.equal(state.stateKey(), keys[k]);
            assert.ok(state.undo(), `undo ${k} (seed ${seed})`);
        }
        assert.equal(state.stateKey(), keys[0]);
        assert.equal(state.dirty, false);
        // replay completely
        for (let k = 1; k < keys.length; k++) {
            assert.ok(state.redo(), `redo ${k} (seed ${seed})`);
            assert.equal(state.stateKey(), keys[k]);
        }
    }
});
test("new edit truncates the redo branch", () => {
    const state = freshState();
    state.move(0, 400, uvOf(400));
    state.move(1, 401, uvOf(401));
    state.undo();
    assert.equal(state.canRedo, true);
    state.move(2, 402, uvOf(402));
    assert.equal(state.canRedo, false);
});
test("legend counts follow provenance", () => {
    const state = EditorState.fromServer(doc([1, 2, 3, 4], ["seed-jaw", "seed-jaw", "seed-nose", "manual"]), uvOf);
    const counts = state.provenanceCounts();
    assert.equal(counts.get("seed-jaw"), 2);
    assert.equal(counts.get("seed-nose"), 1);
    assert.equal(counts.get("manual"), 1);
});
