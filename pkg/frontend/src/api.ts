/** Typed client for the session service. Talks only to the documented
 * endpoints; every error body is {code, message}. */

export interface GraphNode {
  id: number;
  name: string;
  degree: number;
}

export interface GraphPayload {
  n: number;
  directed: boolean;
  nodes: GraphNode[];
  edges: [number, number][];
  k: number;
  class_names: string[] | null;
}

export type Phase = "sampling" | "awaiting-label" | "paused" | "finished";

export interface ExploredEntry {
  node: number;
  label: number;
}

export interface StatePayload {
  session_id: string;
  dataset: string;
  phase: Phase;
  version: number;
  stage: number;
  strategy: string;
  k: number;
  suggested_node: number | null;
  scores: (number | null)[] | null;
  marginals: number[][] | null;
  explored: ExploredEntry[];
  accuracy: Record<string, number> | null;
  sampling_seconds: number | null;
}

export interface LabelAck {
  ok: boolean;
  version: number;
  stage?: number;
  duplicate?: boolean;
}

export interface TrajectoryRecord {
  stage: number;
  queried_node: number | null;
  revealed_label: number | null;
  strategy: string;
  scores: (number | null)[];
  marginals: number[][];
  accuracy: Record<string, number> | null;
}

export interface TrajectoryExport {
  strategy: string;
  seed: number;
  config: Record<string, unknown>;
  records: TrajectoryRecord[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function parseError(res: Response): Promise<ApiError> {
  let code = "unknown";
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, code, message);
}

export class SessionClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  createSession(dataset: string, strategy: string, seed: number, k?: number) {
    return this.request<{ session_id: string }>("/api/session", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ dataset, strategy, seed, ...(k !== undefined ? { k } : {}) }),
    });
  }

  getGraph(sessionId: string) {
    return this.request<GraphPayload>(`/api/session/${sessionId}/graph`);
  }

  /** Plain fetch of the current state, or a long-poll that returns once the
   * server version exceeds `since`. */
  getState(sessionId: string, since?: number) {
    const qs = since !== undefined ? `?since=${since}` : "";
    return this.request<StatePayload>(`/api/session/${sessionId}/state${qs}`);
  }

  postLabel(sessionId: string, node: number, label: number, version: number) {
    return this.request<LabelAck>(`/api/session/${sessionId}/label`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ node, label, version }),
    });
  }

  control(sessionId: string, action: "pause" | "resume" | "export" | "set-strategy", strategy?: string) {
    return this.request<TrajectoryExport & LabelAck>(`/api/session/${sessionId}/control`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(strategy !== undefined ? { action, strategy } : { action }),
    });
  }

  exportTrajectory(sessionId: string): Promise<TrajectoryExport> {
    return this.control(sessionId, "export") as Promise<TrajectoryExport>;
  }
}
