/** Session view model: polls versioned state, serializes label submissions,
 * and recovers from version conflicts by refetching. One in-flight mutation
 * at a time; listeners fire on every accepted state change. */

import { ApiError, Phase, SessionClient, StatePayload, GraphPayload } from "./api.js";

export interface CurvePoint {
  stage: number;
  /** accuracy at q=0.9 in benchmark mode, null in field mode */
  accuracy: number | null;
  meanEntropy: number;
  maxScore: number | null;
}

export type SubmitResult =
  | { outcome: "accepted"; version: number }
  | { outcome: "conflict"; code: string; message: string }
  | { outcome: "rejected"; code: string; message: string };

export type Listener = (state: StatePayload) => void;

/** Shannon entropy of one marginal row, in nats. */
export function rowEntropy(row: number[]): number {
  let h = 0;
  for (const p of row) if (p > 0) h -= p * Math.log(p);
  return h;
}

/** Map a marginal row to a confidence in [0, 1]: 1 at a point mass,
 * 0 at the uniform distribution. */
export function confidence(row: number[], k: number): number {
  if (k < 2) return 1;
  return 1 - rowEntropy(row) / Math.log(k);
}

export class SessionViewModel {
  state: StatePayload | null = null;
  graph: GraphPayload | null = null;
  curve: CurvePoint[] = [];
  private sessionId = "";
  private listeners: Listener[] = [];
  private submitting = false;
  private seenStages = new Set<number>();

  constructor(private client: SessionClient) {}

  onChange(fn: Listener) {
    this.listeners.push(fn);
  }

  private apply(state: StatePayload) {
    this.state = state;
    this.recordCurvePoint(state);
    for (const fn of this.listeners) fn(state);
  }

  private recordCurvePoint(state: StatePayload) {
    if (state.phase === "sampling" || state.marginals === null) return;
    if (this.seenStages.has(state.stage)) return;
    this.seenStages.add(state.stage);
    const entropies = state.marginals.map(rowEntropy);
    const defined = (state.scores ?? []).filter((s): s is number => s !== null);
    this.curve.push({
      stage: state.stage,
      accuracy: state.accuracy ? state.accuracy["0.9"] : null,
      meanEntropy: entropies.reduce((a, b) => a + b, 0) / entropies.length,
      maxScore: defined.length ? Math.max(...defined) : null,
    });
    this.curve.sort((a, b) => a.stage - b.stage);
  }

  get phase(): Phase | null {
    return this.state?.phase ?? null;
  }

  get version(): number {
    return this.state?.version ?? 0;
  }

  isExplored(node: number): boolean {
    return (this.state?.explored ?? []).some((e) => e.node === node);
  }

  async start(dataset: string, strategy: string, seed: number, k?: number) {
    const { session_id } = await this.client.createSession(dataset, strategy, seed, k);
    this.sessionId = session_id;
    this.graph = await this.client.getGraph(session_id);
    this.apply(await this.client.getState(session_id));
  }

  /** Attach to an existing session instead of creating one. */
  async attach(sessionId: string) {
    this.sessionId = sessionId;
    this.graph = await this.client.getGraph(sessionId);
    this.apply(await this.client.getState(sessionId));
  }

  async refresh() {
    this.apply(await this.client.getState(this.sessionId));
  }

  /** Long-poll until the version moves past the last seen one. */
  async pollOnce() {
    this.apply(await this.client.getState(this.sessionId, this.version));
  }

  /** Poll until a predicate on the state holds (e.g. awaiting-label). */
  async waitFor(pred: (s: StatePayload) => boolean, maxPolls = 100) {
    for (let i = 0; i < maxPolls; i++) {
      if (this.state && pred(this.state)) return;
      await this.pollOnce();
    }
    throw new Error("state condition not reached");
  }

  /** Submit a label at the current version. On a stale-version conflict the
   * model refetches so the caller can re-prompt with fresh state; duplicate
   * rapid submissions are collapsed client-side. */
  async submitLabel(node: number, label: number): Promise<SubmitResult> {
    if (this.submitting) {
      return { outcome: "rejected", code: "busy", message: "submission in flight" };
    }
    this.submitting = true;
    try {
      const ack = await this.client.postLabel(this.sessionId, node, label, this.version);
      await this.refresh();
      return { outcome: "accepted", version: ack.version };
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // stale version, explored node, or wrong phase: recover by refetching
        await this.refresh();
        return { outcome: "conflict", code: err.code, message: err.message };
      }
      if (err instanceof ApiError) {
        return { outcome: "rejected", code: err.code, message: err.message };
      }
      throw err;
    } finally {
      this.submitting = false;
    }
  }

  async setStrategy(strategy: string) {
    await this.client.control(this.sessionId, "set-strategy", strategy);
    await this.refresh();
  }

  async pause() {
    await this.client.control(this.sessionId, "pause");
    await this.refresh();
  }

  async resume() {
    await this.client.control(this.sessionId, "resume");
    await this.refresh();
  }

  exportTrajectory() {
    return this.client.exportTrajectory(this.sessionId);
  }
}
