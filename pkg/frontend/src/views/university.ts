/**
 * University desk: enroll students, upload certificate documents, and watch
 * each upload walk Pending -> Confirmed as rounds complete.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, field, notice, textInput } from "../dom.js";
import { trackConfirmation } from "../poll.js";

const CATEGORIES = ["Academic", "ExtraCurricular", "Employability", "Voluntary", "Prize"];

export interface UniversityDeps {
  api: ApiClient;
  universityId: string;
  onSubmitted: (txId: string, label: string) => void;
  pollIntervalMs?: number;
}

export function renderUniversityDesk(root: HTMLElement, deps: UniversityDeps): void {
  const { api, universityId } = deps;

  // -- roster -------------------------------------------------------------
  const studentId = textInput("student_id", "student id, e.g. s100");
  const studentName = textInput("student_name", "full name");
  const studentEmail = textInput("student_email", "email");
  const studentSecret = textInput("student_secret", "initial secret", "password");
  const rosterStatus = el("p", { class: "inline-error" });
  const addButton = el("button", { type: "button" }, "Add student");
  const roster = el("ul", { class: "plain" });
  const known: string[] = [];
  addButton.addEventListener("click", async () => {
    try {
      await api.addStudent(
        universityId,
        studentId.value.trim(),
        studentName.value.trim(),
        studentEmail.value.trim(),
        studentSecret.value,
      );
      known.push(studentId.value.trim());
      rosterStatus.textContent = "";
      clear(roster).append(...known.map((s) => el("li", { class: "mono" }, s)));
    } catch (err) {
      rosterStatus.textContent = err instanceof ApiError ? err.message : String(err);
    }
  });

  // -- certificate upload ----------------------------------------------------
  const uploadStudent = textInput("upload_student", "student id");
  const titleInput = textInput("title", "e.g. BSc Computing");
  const categorySelect = el("select", { name: "category" });
  categorySelect.append(...CATEGORIES.map((c) => el("option", { value: c }, c)));
  const fileInput = el("input", { type: "file", name: "document" });
  const uploadStatus = el("div", {});
  const tracker = el("ul", { class: "tracker plain" });

  const uploadButton = el("button", { type: "button" }, "Authenticate certificate");
  uploadButton.addEventListener("click", async () => {
    clear(uploadStatus);
    const file = fileInput.files?.[0];
    if (!file) {
      uploadStatus.append(notice("bad", "choose a document to upload"));
      return;
    }
    try {
      const receipt = await api.uploadCertificate(
        universityId,
        {
          student_id: uploadStudent.value.trim(),
          title: titleInput.value.trim(),
          category: categorySelect.value,
        },
        file,
        file.name,
      );
      deps.onSubmitted(receipt.tx_id, `certificate ${titleInput.value.trim()}`);
      const item = el(
        "li",
        {},
        el("span", { class: "mono" }, receipt.cert_digest),
        " ",
        el("span", { class: "badge pending" }, "Pending"),
      );
      tracker.append(item);
      const badge = item.querySelector(".badge") as HTMLElement;
      const final = await trackConfirmation(() => api.txStatus(receipt.tx_id), {
        intervalMs: deps.pollIntervalMs ?? 1000,
        onUpdate: (s) => {
          badge.textContent = s.state === "pending" ? "Pending" : s.state;
        },
      });
      if (final.state === "confirmed") {
        badge.textContent = `Confirmed (block ${final.block_index})`;
        badge.className = "badge ok";
      } else {
        badge.textContent = final.reason ?? final.execution_error ?? "failed";
        badge.className = "badge revoked";
      }
    } catch (err) {
      if (err instanceof ApiError && err.code === "wallet_underfunded") {
        uploadStatus.append(
          notice("bad", "wallet underfunded: ask the admin to run the faucet for this university"),
        );
      } else if (err instanceof ApiError) {
        uploadStatus.append(notice("bad", err.message)); // e.g. inline "duplicate digest"
      } else {
        uploadStatus.append(notice("bad", String(err)));
      }
    }
  });

  clear(root).append(
    el("h2", {}, "University desk"),
    el(
      "section",
      { class: "card" },
      el("h3", {}, "Enroll a student"),
      field("Student id", studentId),
      field("Name", studentName),
      field("Email", studentEmail),
      field("Initial secret", studentSecret),
      addButton,
      rosterStatus,
      roster,
    ),
    el(
      "section",
      { class: "card" },
      el("h3", {}, "Authenticate a certificate"),
      field("Student id", uploadStudent),
      field("Title", titleInput),
      field("Category", categorySelect),
      field("Document", fileInput),
      uploadButton,
      uploadStatus,
      el("h3", {}, "Confirmation tracker"),
      tracker,
    ),
  );
}
