/**
 * The verifying window: paste a fingerprint or pick a file, get the boolean
 * verdict front and center. Public; no session required.
 *
 * Digest input is validated client-side (exactly 32 hex chars) before any
 * request is sent; file input is uploaded raw and hashed server-side.
 */

import { ApiClient, ApiError, VerifyResult } from "../api.js";
import { digestInputError, normalizeDigest } from "../digest.js";
import { clear, el, field, notice, textInput } from "../dom.js";
import { verifyViewModel } from "../viewmodel.js";

export function renderVerifyWindow(root: HTMLElement, api: ApiClient): void {
  const digestInput = textInput("digest", "32-character fingerprint, e.g. 900150983cd2...");
  const fileInput = el("input", { type: "file", name: "document" });
  const inlineError = el("p", { class: "inline-error" });
  const resultBox = el("div", { class: "verify-result" });

  const showResult = (result: VerifyResult) => {
    const vm = verifyViewModel(result);
    clear(resultBox).append(
      el("div", { class: `verdict ${vm.tone}` }, vm.headline),
      el("p", { class: "detail" }, vm.detail),
      el("p", { class: "digest mono" }, vm.digest),
      vm.revoked ? el("p", { class: "badge revoked" }, "revoked") : "",
    );
  };

  const showFailure = (err: unknown) => {
    const message = err instanceof ApiError ? err.message : String(err);
    clear(resultBox).append(notice("bad", `verification failed: ${message}`));
  };

  const checkDigest = async () => {
    const problem = digestInputError(digestInput.value);
    inlineError.textContent = problem;
    if (problem) return; // malformed input never leaves the browser
    const digest = normalizeDigest(digestInput.value);
    if (digest === null) return;
    try {
      showResult(await api.verifyDigest(digest));
    } catch (err) {
      showFailure(err);
    }
  };

  const checkFile = async () => {
    const file = fileInput.files?.[0];
    if (!file) {
      inlineError.textContent = "choose a document first";
      return;
    }
    inlineError.textContent = "";
    try {
      showResult(await api.verifyDocument(file, file.name));
    } catch (err) {
      showFailure(err);
    }
  };

  const digestButton = el("button", { type: "button" }, "Verify fingerprint");
  digestButton.addEventListener("click", () => void checkDigest());
  const fileButton = el("button", { type: "button" }, "Verify document");
  fileButton.addEventListener("click", () => void checkFile());

  clear(root).append(
    el("h2", {}, "Verify a certificate"),
    el(
      "section",
      { class: "card" },
      field("Certificate fingerprint", digestInput),
      digestButton,
      inlineError,
      el("hr"),
      field("Or upload the document", fileInput),
      fileButton,
    ),
    resultBox,
  );
}
