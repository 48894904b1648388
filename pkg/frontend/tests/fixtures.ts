/** Golden API payloads shared with the service test suite. */
import { readFileSync } from "node:fs";

import type {
  ConfusionPayload,
  CurvePayload,
  PdpPayload,
  TemporalPayload,
} from "../src/api.js";

function golden<T>(name: string): T {
  const url = new URL(`../../tests/golden/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export const curveFixture = golden<CurvePayload>("curve.json");
export const confusionFixture = golden<ConfusionPayload>("confusion_w20.json");
export const temporalFixture = golden<TemporalPayload>("temporal.json");
export const pdpFixture = golden<PdpPayload>("pdp_w20_g5.json");
