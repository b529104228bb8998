/**
 * Console view state. Pure data + transitions so the role gating and the
 * pending-operation tracker are testable without a DOM.
 *
 * The authorization rules here only mirror the service matrix for display
 * purposes; the server remains the authority and the UI holds no
 * authoritative data.
 */

import type { Role, TxStatus } from "./api.js";

export type ViewName =
  | "login"
  | "admin-dashboard"
  | "university-desk"
  | "student-record"
  | "employer-verify"
  | "employer-search";

export interface SessionInfo {
  token: string;
  userId: string;
  role: Role;
  displayName: string;
}

export type PendingState = "submitted" | "awaiting-confirmation" | "confirmed" | "failed";

export interface PendingOperation {
  txId: string;
  label: string;
  state: PendingState;
  detail?: string;
  blockIndex?: number;
}

export interface ViewState {
  session: SessionInfo | null;
  view: ViewName;
  pending: PendingOperation[];
}

/** Verification is public; everything else needs the matching role. */
const ROLE_VIEWS: Record<Role, ViewName[]> = {
  admin: ["admin-dashboard", "employer-verify"],
  university: ["university-desk", "employer-verify"],
  student: ["student-record", "employer-verify"],
  employer: ["employer-verify", "employer-search"],
};

export function allowedViews(session: SessionInfo | null): ViewName[] {
  if (session === null) return ["login", "employer-verify"];
  return ROLE_VIEWS[session.role];
}

export function homeView(session: SessionInfo | null): ViewName {
  const views = allowedViews(session);
  return views[0] ?? "login";
}

export function initialState(): ViewState {
  return { session: null, view: "login", pending: [] };
}

export function loggedIn(state: ViewState, session: SessionInfo): ViewState {
  return { session, view: homeView(session), pending: [] };
}

export function loggedOut(_state: ViewState): ViewState {
  return initialState();
}

/** Navigation is clamped: an off-limits view bounces to the session's home. */
export function navigate(state: ViewState, view: ViewName): ViewState {
  if (!allowedViews(state.session).includes(view)) {
    return { ...state, view: homeView(state.session) };
  }
  return { ...state, view };
}

export function operationSubmitted(state: ViewState, txId: string, label: string): ViewState {
  const op: PendingOperation = { txId, label, state: "submitted" };
  return { ...state, pending: [...state.pending, op] };
}

/** Fold a /chain/status answer into the tracker list. */
export function operationStatus(state: ViewState, txId: string, status: TxStatus): ViewState {
  const pending = state.pending.map((op): PendingOperation => {
    if (op.txId !== txId) return op;
    if (status.state === "confirmed") {
      return { ...op, state: "confirmed", blockIndex: status.block_index, detail: undefined };
    }
    if (status.state === "rejected") {
      return { ...op, state: "failed", detail: status.reason ?? "rejected" };
    }
    if (status.execution_error) {
      return { ...op, state: "failed", detail: status.execution_error };
    }
    return { ...op, state: "awaiting-confirmation" };
  });
  return { ...state, pending };
}

export function viewTitle(view: ViewName): string {
  switch (view) {
    case "login":
      return "Sign in";
    case "admin-dashboard":
      return "Administration";
    case "university-desk":
      return "University desk";
    case "student-record":
      return "My achievement record";
    case "employer-verify":
      return "Verify a certificate";
    case "employer-search":
      return "Search candidates";
  }
}
