import type {
  ApiError,
  KeypointSetDoc,
  KeypointSetPut,
  TemplatePayload,
} from "./types.js";

export type SaveOutcome =
  | { status: "saved"; doc: KeypointSetDoc }
  | { status: "invalid"; message: string; invariant?: string }
  | { status: "stale"; message: string }
  | { status: "network"; message: string };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the serve API; fetch is injectable for tests. */
export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) =>
      globalThis.fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async getTemplate(): Promise<TemplatePayload> {
    const resp = await this.fetchImpl(this.url("/api/template"));
    if (!resp.ok) throw new Error(`template fetch failed: ${resp.status}`);
    return (await resp.json()) as TemplatePayload;
  }

  async getKeypointSet(): Promise<KeypointSetDoc> {
    const resp = await this.fetchImpl(this.url("/api/keypointset"));
    if (!resp.ok) throw new Error(`keypoint fetch failed: ${resp.status}`);
    return (await resp.json()) as KeypointSetDoc;
  }

  async putKeypointSet(body: KeypointSetPut): Promise<SaveOutcome> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.url("/api/keypointset"), {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      return { status: "network", message: String(err) };
    }
    if (resp.status === 200)
      return { status: "saved", doc: (await resp.json()) as KeypointSetDoc };
    let message = `HTTP ${resp.status}`;
    let invariant: string | undefined;
    try {
      const doc = (await resp.json()) as ApiError;
      message = doc.error.message;
      invariant = doc.error.invariant;
    } catch {
      /* non-JSON error body; keep the status text */
    }
    if (resp.status === 409) return { status: "stale", message };
    return { status: "invalid", message, invariant };
  }

  async getPreview(id: string): Promise<Record<string, unknown> | null> {
    const resp = await this.fetchImpl(
      this.url(`/api/preview/${encodeURIComponent(id)}`),
    );
    if (resp.status === 404) return null;
    if (!resp.ok) throw new Error(`preview fetch failed: ${resp.status}`);
    return (await resp.json()) as Record<string, unknown>;
  }
}
