import { StatePayload } from "../src/api.js";

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function fakeState(partial: Partial<StatePayload>): StatePayload {
  return {
    session_id: "s",
    dataset: "karate",
    phase: "awaiting-label",
    version: 1,
    stage: 0,
    strategy: "mi",
    k: 2,
    suggested_node: 0,
    scores: [0.5, 0.2],
    marginals: [
      [0.5, 0.5],
      [0.9, 0.1],
    ],
    explored: [],
    accuracy: null,
    sampling_seconds: null,
  ...partial,
  };
}
