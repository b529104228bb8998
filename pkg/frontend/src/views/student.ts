/**
 * Student record view: the achievement timeline grouped by category,
 * per-entry fingerprint with a copy action (the student forwards it to
 * employers), revoked entries struck through, and the credential reset flow.
 */

import { ApiClient, ApiError, RecordEntry } from "../api.js";
import { clear, el, field, notice, textInput } from "../dom.js";
import { groupByCategory } from "../viewmodel.js";

export interface StudentDeps {
  api: ApiClient;
  studentId: string;
  copyToClipboard?: (text: string) => Promise<void>;
}

function entryItem(entry: RecordEntry, copy: (text: string) => Promise<void>): HTMLElement {
  const copyButton = el("button", { type: "button", class: "small" }, "copy fingerprint");
  copyButton.addEventListener("click", () => void copy(entry.cert_digest));
  const title = el("span", { class: entry.revoked ? "struck" : "" }, entry.title);
  return el(
    "li",
    { class: "entry" },
    title,
    el("span", { class: "dim" }, ` — ${entry.issuer_university}, block ${entry.confirmed_block}`),
    entry.revoked ? el("span", { class: "badge revoked" }, "revoked") : "",
    el("div", { class: "mono dim" }, entry.cert_digest),
    copyButton,
  );
}

export function renderStudentView(root: HTMLElement, deps: StudentDeps): void {
  const { api, studentId } = deps;
  const copy =
    deps.copyToClipboard ?? ((text: string) => navigator.clipboard.writeText(text));
  const timeline = el("div", {});

  const refresh = async () => {
    const record = await api.record(studentId);
    clear(timeline);
    if (!record.entries.length) {
      timeline.append(el("p", { class: "dim" }, "no achievements recorded yet"));
      return;
    }
    for (const [category, entries] of groupByCategory(record.entries)) {
      timeline.append(
        el("h3", {}, category),
        el("ul", { class: "plain" }, ...entries.map((e) => entryItem(e, copy))),
      );
    }
  };

  // -- credential reset --------------------------------------------------------
  const resetStatus = el("p", { class: "inline-error" });
  const requestButton = el("button", { type: "button" }, "Email me a reset code");
  requestButton.addEventListener("click", async () => {
    await api.requestReset(studentId);
    resetStatus.textContent = "if the account exists, a reset code was emailed";
  });
  const tokenInput = textInput("token", "32-character code from the email");
  const newSecret = textInput("new_secret", "new secret", "password");
  const applyButton = el("button", { type: "button" }, "Apply reset");
  applyButton.addEventListener("click", async () => {
    try {
      await api.applyReset(tokenInput.value.trim(), newSecret.value);
      resetStatus.textContent = "secret changed; sign in again";
    } catch (err) {
      resetStatus.textContent = err instanceof ApiError ? err.message : String(err);
    }
  });

  const refreshButton = el("button", { type: "button" }, "Refresh record");
  refreshButton.addEventListener("click", () => void refresh());

  clear(root).append(
    el("h2", {}, "My achievement record"),
    el("section", { class: "card" }, timeline, refreshButton),
    el(
      "section",
      { class: "card" },
      el("h3", {}, "Reset my sign-in secret"),
      requestButton,
      field("Reset code", tokenInput),
      field("New secret", newSecret),
      applyButton,
      resetStatus,
    ),
  );
  void refresh();
}
