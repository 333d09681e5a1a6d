import type {
  GraphDoc,
  InterventionSpec,
  NarrativeResponse,
  Scope,
  SessionDoc,
  TraceDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service returned ${status}: ${JSON.stringify(detail)}`);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = await resp.json();
  if (!resp.ok) throw new ApiError(resp.status, body.detail ?? body);
  return body as T;
}

export interface SessionPatch {
  interventions?: InterventionSpec[];
  objectives?: string[];
  scope?: Scope;
  budget?: number | null;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async send<T>(path: string, method: string, body?: unknown): Promise<T> {
    return parse<T>(
      await fetch(this.url(path), {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      }),
    );
  }

  putGraph(doc: GraphDoc): Promise<{ version: string }> {
    return this.send("/graphs", "PUT", doc);
  }

  getGraph(version: string): Promise<GraphDoc> {
    return this.send(`/graphs/${version}`, "GET");
  }

  createSession(body: {
    graph_version: string;
    interventions?: InterventionSpec[];
    objectives?: string[];
    seed?: number;
    horizon?: number;
  }): Promise<{ id: string; version: number; session: SessionDoc }> {
    return this.send("/sessions", "POST", body);
  }

  patchSession(
    id: string,
    patch: SessionPatch,
  ): Promise<{ id: string; version: number; session: SessionDoc }> {
    return this.send(`/sessions/${id}`, "PATCH", patch);
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.send(`/sessions/${id}`, "GET");
  }

  getNarrative(id: string): Promise<NarrativeResponse> {
    return this.send(`/sessions/${id}/narrative`, "GET");
  }

  getTrace(id: string): Promise<TraceDoc> {
    return this.send(`/sessions/${id}/trace`, "GET");
  }

  search(id: string, q: string): Promise<{ query: string; hits: [number, number][] }> {
    return this.send(`/sessions/${id}/search?q=${encodeURIComponent(q)}`, "GET");
  }
}
