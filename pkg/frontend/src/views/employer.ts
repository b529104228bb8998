/** Employer candidate search over non-revoked achievements. */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, field, textInput } from "../dom.js";

const CATEGORIES = ["", "Academic", "ExtraCurricular", "Employability", "Voluntary", "Prize"];

export function renderEmployerSearch(root: HTMLElement, api: ApiClient): void {
  const categorySelect = el("select", { name: "category" });
  categorySelect.append(...CATEGORIES.map((c) => el("option", { value: c }, c || "any category")));
  const universityInput = textInput("university", "university name (exact)");
  const keywordInput = textInput("keyword", "title keyword");
  const status = el("p", { class: "inline-error" });
  const results = el("div", {});

  const searchButton = el("button", { type: "button" }, "Search");
  searchButton.addEventListener("click", async () => {
    status.textContent = "";
    try {
      const { results: hits } = await api.search({
        category: categorySelect.value || undefined,
        university: universityInput.value.trim() || undefined,
        keyword: keywordInput.value.trim() || undefined,
      });
      clear(results);
      if (!hits.length) {
        results.append(el("p", { class: "dim" }, "no matching candidates"));
        return;
      }
      for (const hit of hits) {
        results.append(
          el(
            "section",
            { class: "card" },
            el("h3", {}, `${hit.display_name} `, el("span", { class: "mono dim" }, hit.student_id)),
            el(
              "ul",
              { class: "plain" },
              ...hit.entries.map((e) =>
                el(
                  "li",
                  {},
                  `${e.title} `,
                  el("span", { class: "dim" }, `(${e.category}, ${e.issuer_university})`),
                ),
              ),
            ),
          ),
        );
      }
    } catch (err) {
      status.textContent = err instanceof ApiError ? err.message : String(err);
    }
  });

  clear(root).append(
    el("h2", {}, "Search candidates"),
    el(
      "section",
      { class: "card" },
      field("Category", categorySelect),
      field("University", universityInput),
      field("Keyword", keywordInput),
      searchButton,
      status,
    ),
    results,
  );
}
