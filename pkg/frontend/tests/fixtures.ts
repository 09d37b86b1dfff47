/** Fixture-backed fake service: replays the frozen responses captured from
 * the real server over the mini_space corpus. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const GOLDEN = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "fixtures", "golden");

export function golden<T>(name: string): T {
  return JSON.parse(readFileSync(join(GOLDEN, name), "utf-8")) as T;
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface FakeService {
  fetch: FetchLike;
  requests: RecordedRequest[];
}

function respond(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Routes the endpoints the UI touches onto the golden payloads. */
export function fakeService(): FakeService {
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    requests.push({ url, method, body });
    if (url === "/datasets") return respond(golden("mini_space_datasets.json"));
    if (url.includes("/whatif")) return respond(golden("mini_space_whatif.json"));
    if (url.includes("/projection")) return respond(golden("mini_space_projection.json"));
    if (url.includes("/instances")) {
      const style = url.includes("style=neighbor") ? "neighbor" : "full";
      return respond(golden(`mini_space_instances_${style}.json`));
    }
    if (/\/shortcuts\/[0-9a-f]+$/.test(url)) return respond(golden("mini_space_detail.json"));
    if (url.includes("/shortcuts")) return respond(golden("mini_space_shortcuts.json"));
    return respond({ detail: `unrouted ${url}` }, 404);
  };
  return { fetch: fetchFn, requests };
}
