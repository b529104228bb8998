/**
 * Console entry point: hash routing over the role-gated views. All state
 * shown here is re-derived from the API; the browser holds nothing
 * authoritative.
 */

import { ApiClient, ApiError } from "./api.js";
import { clear, el, field, notice, textInput } from "./dom.js";
import {
  ViewName,
  ViewState,
  allowedViews,
  homeView,
  initialState,
  loggedIn,
  loggedOut,
  navigate,
  operationSubmitted,
  viewTitle,
} from "./state.js";
import { renderAdminDashboard } from "./views/admin.js";
import { renderEmployerSearch } from "./views/employer.js";
import { renderStudentView } from "./views/student.js";
import { renderUniversityDesk } from "./views/university.js";
import { renderVerifyWindow } from "./views/verify.js";

const api = new ApiClient("");
let state: ViewState = initialState();

function setState(next: ViewState): void {
  state = next;
  render();
}

function renderLogin(root: HTMLElement): void {
  const userInput = textInput("user_id", "sign-in id");
  const secretInput = textInput("secret", "secret", "password");
  const status = el("p", { class: "inline-error" });
  const button = el("button", { type: "button" }, "Sign in");
  button.addEventListener("click", async () => {
    try {
      const session = await api.login(userInput.value.trim(), secretInput.value);
      setState(
        loggedIn(state, {
          token: session.token,
          userId: session.user_id,
          role: session.role,
          displayName: session.display_name,
        }),
      );
    } catch (err) {
      status.textContent = err instanceof ApiError ? err.message : String(err);
    }
  });
  clear(root).append(
    el("h2", {}, "Sign in"),
    el(
      "section",
      { class: "card" },
      field("Id", userInput),
      field("Secret", secretInput),
      button,
      status,
      notice("info", "verification needs no account: use the Verify tab"),
    ),
  );
}

function renderNav(): HTMLElement {
  const nav = el("nav", {});
  for (const view of allowedViews(state.session)) {
    const link = el("a", { href: `#/${view}`, class: view === state.view ? "active" : "" }, viewTitle(view));
    nav.append(link);
  }
  if (state.session) {
    const who = el("span", { class: "dim" }, `${state.session.displayName} (${state.session.role})`);
    const out = el("button", { type: "button", class: "small" }, "Sign out");
    out.addEventListener("click", async () => {
      await api.logout().catch(() => undefined);
      setState(loggedOut(state));
    });
    nav.append(who, out);
  }
  return nav;
}

function render(): void {
  const app = document.getElementById("app");
  if (!app) return;
  const body = el("main", {});
  switch (state.view) {
    case "login":
      renderLogin(body);
      break;
    case "admin-dashboard":
      renderAdminDashboard(body, {
        api,
        onSubmitted: (txId, label) => {
          state = operationSubmitted(state, txId, label);
        },
      });
      break;
    case "university-desk":
      renderUniversityDesk(body, {
        api,
        universityId: state.session?.userId ?? "",
        onSubmitted: (txId, label) => {
          state = operationSubmitted(state, txId, label);
        },
      });
      break;
    case "student-record":
      renderStudentView(body, { api, studentId: state.session?.userId ?? "" });
      break;
    case "employer-verify":
      renderVerifyWindow(body, api);
      break;
    case "employer-search":
      renderEmployerSearch(body, api);
      break;
  }
  clear(app).append(el("header", {}, el("h1", {}, "Achievement Registry"), renderNav()), body);
}

function viewFromHash(): ViewName {
  const raw = window.location.hash.replace(/^#\//, "");
  const views: ViewName[] = [
    "login",
    "admin-dashboard",
    "university-desk",
    "student-record",
    "employer-verify",
    "employer-search",
  ];
  return (views as string[]).includes(raw) ? (raw as ViewName) : homeView(state.session);
}

window.addEventListener("hashchange", () => setState(navigate(state, viewFromHash())));
window.addEventListener("DOMContentLoaded", () => setState(navigate(state, viewFromHash())));
