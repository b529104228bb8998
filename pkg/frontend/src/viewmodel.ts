/** Pure view-models: what the screens display, separated from how. */

import type { RecordEntry, VerifyResult } from "./api.js";

export interface VerifyViewModel {
  headline: "VALID" | "NOT VERIFIED";
  tone: "ok" | "bad";
  digest: string;
  issuer: string | null;
  revoked: boolean;
  detail: string;
}

export function verifyViewModel(result: VerifyResult): VerifyViewModel {
  if (result.valid) {
    return {
      headline: "VALID",
      tone: "ok",
      digest: result.checked_digest,
      issuer: result.issuer_name,
      revoked: false,
      detail: `authenticated by ${result.issuer_name}`,
    };
  }
  return {
    headline: "NOT VERIFIED",
    tone: "bad",
    digest: result.checked_digest,
    issuer: result.issuer_name,
    revoked: result.revoked,
    detail: result.revoked
      ? `revoked by ${result.issuer_name}`
      : "no university authenticated this fingerprint",
  };
}

/** Record timeline grouped by category, newest confirmation first per group. */
export function groupByCategory(entries: RecordEntry[]): Map<string, RecordEntry[]> {
  const groups = new Map<string, RecordEntry[]>();
  for (const entry of entries) {
    const bucket = groups.get(entry.category);
    if (bucket) bucket.push(entry);
    else groups.set(entry.category, [entry]);
  }
  for (const bucket of groups.values()) {
    bucket.sort((a, b) => b.confirmed_block - a.confirmed_block);
  }
  return groups;
}
