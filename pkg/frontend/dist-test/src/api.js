/** Thin typed client over the serve API; fetch is injectable for tests. */
export class ApiClient {
    baseUrl;
    fetchImpl;
    constructor(baseUrl, fetchImpl = (input, init) => globalThis.fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    url(path) {
        return this.baseUrl.replace(/\/$/, "") + path;
    }
    async getTemplate() {
        const resp = await this.fetchImpl(this.url("/api/template"));
        if (!resp.ok)
            throw new Error(`template fetch failed: ${resp.status}`);
        return (await resp.json());
    }
    async getKeypointSet() {
        const resp = await this.fetchImpl(this.url("/api/keypointset"));
        if (!resp.ok)
            throw new Error(`keypoint fetch failed: ${resp.status}`);
        return (await resp.json());
    }
    async putKeypointSet(body) {
        let resp;
        try {
            resp = await this.fetchImpl(this.url("/api/keypointset"), {
                method: "PUT",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify(body),
            });
        }
        catch (err) {
            return { status: "network", message: String(err) };
        }
        if (resp.status === 200)
            return { status: "saved", doc: (await resp.json()) };
        let message = `HTTP ${resp.status}`;
        let invariant;
        try {
            const doc = (await resp.json());
            message = doc.error.message;
            invariant = doc.error.invariant;
        }
        catch {
            /* non-JSON error body; keep the status text */
        }
        if (resp.status === 409)
            return { status: "stale", message };
        return { status: "invalid", message, invariant };
    }
    async getPreview(id) {
        const resp = await this.fetchImpl(this.url(`/api/preview/${encodeURIComponent(id)}`));
        if (resp.status === 404)
            return null;
        if (!resp.ok)
            throw new Error(`preview fetch failed: ${resp.status}`);
        return (await resp.json());
    }
}
