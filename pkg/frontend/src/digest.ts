/** Client-side validation of certificate fingerprints (32 hex chars). */

const DIGEST_RE = /^[0-9a-f]{32}$/;

/** Lowercased, trimmed digest, or null when the input is not 32 hex chars. */
export function normalizeDigest(input: string): string | null {
  const candidate = input.trim().toLowerCase();
  return DIGEST_RE.test(candidate) ? candidate : null;
}

export function isDigestHex(input: string): boolean {
  return normalizeDigest(input) !== null;
}

/** Inline form feedback for the verify window; empty string means ok. */
export function digestInputError(input: string): string {
  const trimmed = input.trim();
  if (!trimmed) return "enter a fingerprint";
  if (normalizeDigest(trimmed) === null) {
    return `a fingerprint is exactly 32 hex characters (got ${trimmed.length})`;
  }
  return "";
}
