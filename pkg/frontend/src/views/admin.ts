/**
 * Admin dashboard: register universities (with on-chain confirmation
 * state), create employer accounts, read the outbox, watch chain health.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, field, notice, textInput } from "../dom.js";
import { trackConfirmation } from "../poll.js";

export interface AdminDeps {
  api: ApiClient;
  onSubmitted: (txId: string, label: string) => void;
  pollIntervalMs?: number;
}

export function renderAdminDashboard(root: HTMLElement, deps: AdminDeps): void {
  const { api } = deps;
  const status = el("div", {});

  // -- university registration ------------------------------------------------
  const nameInput = textInput("name", "Newcastle University");
  const idInput = textInput("user_id", "sign-in id, e.g. ncl");
  const emailInput = textInput("email", "registrar@example.org");
  const secretInput = textInput("secret", "initial secret", "password");
  const registerButton = el("button", { type: "button" }, "Register university");
  registerButton.addEventListener("click", async () => {
    clear(status);
    try {
      const receipt = await api.registerUniversity(
        nameInput.value.trim(),
        idInput.value.trim(),
        emailInput.value.trim(),
        secretInput.value,
      );
      deps.onSubmitted(receipt.tx_id, `register ${nameInput.value.trim()}`);
      status.append(notice("info", `submitted; awaiting confirmation (tx ${receipt.tx_id})`));
      const final = await trackConfirmation(() => api.txStatus(receipt.tx_id), {
        intervalMs: deps.pollIntervalMs ?? 1000,
      });
      clear(status).append(
        final.state === "confirmed"
          ? notice("ok", `confirmed in block ${final.block_index}`)
          : notice("bad", `not confirmed: ${final.reason ?? final.execution_error ?? final.state}`),
      );
      await refreshUniversities();
    } catch (err) {
      const message = err instanceof ApiError ? err.message : String(err);
      clear(status).append(notice("bad", message)); // duplicate names land here inline
    }
  });

  // -- employer accounts -------------------------------------------------------
  const employerId = textInput("employer_id", "employer sign-in id");
  const employerName = textInput("employer_name", "display name");
  const employerEmail = textInput("employer_email", "email");
  const employerSecret = textInput("employer_secret", "initial secret", "password");
  const employerStatus = el("p", { class: "inline-error" });
  const employerButton = el("button", { type: "button" }, "Create employer account");
  employerButton.addEventListener("click", async () => {
    try {
      await api.addEmployer(
        employerId.value.trim(),
        employerName.value.trim(),
        employerEmail.value.trim(),
        employerSecret.value,
      );
      employerStatus.textContent = "employer account created";
    } catch (err) {
      employerStatus.textContent = err instanceof ApiError ? err.message : String(err);
    }
  });

  // -- live panels -------------------------------------------------------------
  const universitiesList = el("ul", { class: "plain" });
  const outboxList = el("div", {});
  const chainPanel = el("dl", { class: "chain-panel" });

  const refreshUniversities = async () => {
    const { universities } = await api.listUniversities();
    clear(universitiesList).append(
      ...universities.map((u) =>
        el("li", {}, `${u.name} `, el("span", { class: "mono dim" }, u.address)),
      ),
    );
  };

  const refreshOutbox = async () => {
    const { events } = await api.outbox();
    clear(outboxList).append(
      ...events.map((e) =>
        el(
          "details",
          {},
          el("summary", {}, `#${e.event_id} to ${e.to}: ${e.subject}`),
          el("pre", { class: "mono" }, e.body),
        ),
      ),
    );
    if (!events.length) outboxList.append(el("p", { class: "dim" }, "outbox is empty"));
  };

  const refreshChain = async () => {
    const summary = await api.chain();
    clear(chainPanel).append(
      el("dt", {}, "chain length"),
      el("dd", {}, String(summary.length)),
      el("dt", {}, "tip hash"),
      el("dd", { class: "mono" }, summary.tip_hash),
      el("dt", {}, "pending pool"),
      el("dd", {}, String(summary.pending)),
    );
  };

  const refreshButton = el("button", { type: "button" }, "Refresh panels");
  refreshButton.addEventListener("click", () => {
    void refreshUniversities();
    void refreshOutbox();
    void refreshChain();
  });

  clear(root).append(
    el("h2", {}, "Administration"),
    el(
      "section",
      { class: "card" },
      el("h3", {}, "Register a university"),
      field("Name", nameInput),
      field("Sign-in id", idInput),
      field("Email", emailInput),
      field("Initial secret", secretInput),
      registerButton,
      status,
    ),
    el(
      "section",
      { class: "card" },
      el("h3", {}, "Create an employer account"),
      field("Sign-in id", employerId),
      field("Name", employerName),
      field("Email", employerEmail),
      field("Initial secret", employerSecret),
      employerButton,
      employerStatus,
    ),
    el("section", { class: "card" }, el("h3", {}, "Registered universities"), universitiesList),
    el("section", { class: "card" }, el("h3", {}, "Email outbox"), outboxList),
    el("section", { class: "card" }, el("h3", {}, "Chain health"), chainPanel, refreshButton),
  );

  void refreshUniversities();
  void refreshOutbox();
  void refreshChain();
}
