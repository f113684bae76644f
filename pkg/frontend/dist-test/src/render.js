import { provenanceColor } from "./types.js";
export function uvToScreen(uv, vp) {
    const side = Math.min(vp.width, vp.height) - 2 * vp.margin;
    return [vp.margin + uv[0] * side, vp.margin + uv[1] * side];
}
export function screenToUv(x, y, vp) {
    const side = Math.min(vp.width, vp.height) - 2 * vp.margin;
    return [(x - vp.margin) / side, (y - vp.margin) / side];
}
export function draw(ctx, template, state, vp) {
    ctx.clearRect(0, 0, vp.width, vp.height);
    ctx.fillStyle = "#1c1f26";
    ctx.fillRect(0, 0, vp.width, vp.height);
    ctx.fillStyle = "#3a414f";
    for (const uv of template.uv) {
        const [x, y] = uvToScreen(uv, vp);
        ctx.fillRect(x - 0.5, y - 0.5, 1, 1);
    }
    state.points.forEach((p, ordinal) => {
        const [x, y] = uvToScreen(p.uv, vp);
        ctx.beginPath();
        ctx.arc(x, y, ordinal === state.selection ? 5 : 3, 0, 2 * Math.PI);
        ctx.fillStyle = provenanceColor(p.provenance);
        ctx.fill();
        if (ordinal === state.selection) {
            ctx.lineWidth = 2;
            ctx.strokeStyle = "#ffffff";
            ctx.stroke();
        }
    });
}
/** legend rows as "tag: count", ordered by tag name */
export function legendRows(state) {
    return [...state.provenanceCounts().entries()]
        .sort(([a], [b]) => a.localeCompare(b))
        .map(([tag, count]) => `${tag}: ${count}`);
}
/** nearest keypoint ordinal to a screen position, within a pick radius */
export function pickKeypoint(state, x, y, vp, radius = 8) {
    let best = null;
    let bestD2 = radius * radius;
    state.points.forEach((p, ordinal) => {
        const [px, py] = uvToScreen(p.uv, vp);
        const d2 = (px - x) * (px - x) + (py - y) * (py - y);
        if (d2 <= bestD2) {
            best = ordinal;
            bestD2 = d2;
        }
    });
    return best;
}
