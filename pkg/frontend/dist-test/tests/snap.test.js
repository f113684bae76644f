import assert from "node:assert/strict";
import { test } from "node:test";
import { snapToVertex } from "../src/snap.js";
function cloud(uv, indices) {
    return {
        vertexCount: 100000,
        indices: indices ?? uv.map((_, k) => k),
        uv,
    };
}
test("exact hit returns that vertex", () => {
    const tpl = cloud([[0.1, 0.1], [0.5, 0.5], [0.9, 0.9]], [10, 20, 30]);
    assert.equal(snapToVertex(0.5, 0.5, tpl).vertex, 20);
});
test("ties resolve to the lowest vertex index", () => {
    const tpl = cloud([[0.4, 0.5], [0.6, 0.5]], [77, 33]);
    assert.equal(snapToVertex(0.5, 0.5, tpl).vertex, 33);
});
test("matches a naive reference scan on random clouds", () => {
    let seed = 42 >>> 0;
    const rand = () => {
        seed = (1103515245 * seed + 12345) % 2147483648;
        return seed / 2147483648;
    };
    const uv = Array.from({ length: 400 }, () => [rand(), rand()]);
    const tpl = cloud(uv);
    for (let t = 0; t < 200; t++) {
        const qu = rand();
        const qv = rand();
        let best = 0;
        let bestD2 = Infinity;
        uv.forEach((p, k) => {
            const d2 = (p[0] - qu) ** 2 + (p[1] - qv) ** 2;
            if (d2 < bestD2) {
                bestD2 = d2;
                best = k;
            }
        });
        assert.equal(snapToVertex(qu, qv, tpl).vertex, best);
    }
});
test("empty cloud throws", () => {
    assert.throws(() => snapToVertex(0, 0, cloud([])));
});
