import { describe, expect, it } from "vitest";

import type { RecordEntry } from "../src/api";
import { groupByCategory, verifyViewModel } from "../src/viewmodel";

const digest = "900150983cd24fb0d6963f7d28e17f72";

describe("verifyViewModel", () => {
  it("shows VALID with the issuer for a good certificate", () => {
    const vm = verifyViewModel({
      checked_digest: digest,
      valid: true,
      issuer_name: "Newcastle University",
      revoked: false,
    });
    expect(vm.headline).toBe("VALID");
    expect(vm.tone).toBe("ok");
    expect(vm.detail).toContain("Newcastle University");
  });

  it("shows NOT VERIFIED for unknown fingerprints", () => {
    const vm = verifyViewModel({
      checked_digest: digest,
      valid: false,
      issuer_name: null,
      revoked: false,
    });
    expect(vm.headline).toBe("NOT VERIFIED");
    expect(vm.tone).toBe("bad");
    expect(vm.revoked).toBe(false);
  });

  it("explains revocation", () => {
    const vm = verifyViewModel({
      checked_digest: digest,
      valid: false,
      issuer_name: "Newcastle University",
      revoked: true,
    });
    expect(vm.headline).toBe("NOT VERIFIED");
    expect(vm.revoked).toBe(true);
    expect(vm.detail).toContain("revoked");
  });
});

describe("groupByCategory", () => {
  const entry = (title: string, category: string, block: number): RecordEntry => ({
    cert_digest: digest,
    title,
    category,
    issuer_university: "NCL",
    tx_id: digest,
    confirmed_block: block,
    revoked: false,
  });

  it("groups and sorts newest-first within a category", () => {
    const groups = groupByCategory([
      entry("old", "Academic", 1),
      entry("new", "Academic", 9),
      entry("run", "ExtraCurricular", 5),
    ]);
    expect([...groups.keys()]).toEqual(["Academic", "ExtraCurricular"]);
    expect(groups.get("Academic")?.map((e) => e.title)).toEqual(["new", "old"]);
  });

  it("handles an empty record", () => {
    expect(groupByCategory([]).size).toBe(0);
  });
});
