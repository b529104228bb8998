/**
 * Confirmation tracking by polling /chain/status/{tx_id}.
 *
 * The service exposes no push channel, so the desk polls until the
 * transaction leaves the pending state. Timer and fetch are injectable for
 * tests; the default interval matches a round tick.
 */

import type { TxStatus } from "./api.js";

export interface TrackOptions {
  intervalMs?: number;
  maxAttempts?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (status: TxStatus) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/** Resolves with the first non-pending status, or the last seen one. */
export async function trackConfirmation(
  fetchStatus: () => Promise<TxStatus>,
  options: TrackOptions = {},
): Promise<TxStatus> {
  const intervalMs = options.intervalMs ?? 1000;
  const maxAttempts = options.maxAttempts ?? 120;
  const sleep = options.sleep ?? defaultSleep;
  let status: TxStatus = { state: "pending" };
  for (let attempt = 0; attempt < maxAttempts; attempt++) {
    status = await fetchStatus();
    options.onUpdate?.(status);
    if (status.state !== "pending" || status.execution_error) return status;
    await sleep(intervalMs);
  }
  return status;
}
