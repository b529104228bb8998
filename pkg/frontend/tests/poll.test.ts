import { describe, expect, it } from "vitest";

import type { TxStatus } from "../src/api";
import { trackConfirmation } from "../src/poll";

function sequence(statuses: TxStatus[]): () => Promise<TxStatus> {
  let i = 0;
  return async () => statuses[Math.min(i++, statuses.length - 1)]!;
}

const instant = async () => {};

describe("trackConfirmation", () => {
  it("polls until confirmed", async () => {
    const seen: string[] = [];
    const result = await trackConfirmation(
      sequence([
        { state: "pending" },
        { state: "pending" },
        { state: "confirmed", block_index: 3, depth: 1 },
      ]),
      { sleep: instant, onUpdate: (s) => seen.push(s.state) },
    );
    expect(result.state).toBe("confirmed");
    expect(result.block_index).toBe(3);
    expect(seen).toEqual(["pending", "pending", "confirmed"]);
  });

  it("stops on rejection", async () => {
    const result = await trackConfirmation(
      sequence([{ state: "pending" }, { state: "rejected", reason: "duplicate" }]),
      { sleep: instant },
    );
    expect(result).toMatchObject({ state: "rejected", reason: "duplicate" });
  });

  it("stops on execution errors", async () => {
    const result = await trackConfirmation(
      sequence([{ state: "pending", execution_error: "unauthorized" }]),
      { sleep: instant },
    );
    expect(result.execution_error).toBe("unauthorized");
  });

  it("gives up after maxAttempts", async () => {
    let calls = 0;
    const result = await trackConfirmation(
      async () => {
        calls++;
        return { state: "pending" } as TxStatus;
      },
      { sleep: instant, maxAttempts: 5 },
    );
    expect(result.state).toBe("pending");
    expect(calls).toBe(5);
  });
});
