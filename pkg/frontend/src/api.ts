/**
 * Typed client for the registry API. The console talks to the service only
 * through these calls; every URL here exists in the documented route table.
 *
 * Documents are never hashed in the browser: uploads send raw bytes and the
 * service computes the fingerprint, so UI and CLI agree byte for byte.
 */

export type Role = "admin" | "university" | "student" | "employer";

export interface LoginResult {
  token: string;
  user_id: string;
  role: Role;
  display_name: string;
}

export interface WhoAmI {
  user_id: string;
  role: Role;
  display_name: string;
  email: string;
  linked_address: string | null;
  university_id: string | null;
}

export interface VerifyResult {
  checked_digest: string;
  valid: boolean;
  issuer_name: string | null;
  revoked: boolean;
}

export interface RecordEntry {
  cert_digest: string;
  title: string;
  category: string;
  issuer_university: string;
  tx_id: string;
  confirmed_block: number;
  revoked: boolean;
}

export interface StudentRecord {
  student_id: string;
  display_name: string;
  entries: RecordEntry[];
}

export interface UniversityRow {
  name: string;
  address: string;
  registered_at: number;
}

export interface OutboxEvent {
  event_id: number;
  to: string;
  subject: string;
  body: string;
  created_at: number;
  delivered: boolean;
}

export interface TxStatus {
  state: "pending" | "confirmed" | "rejected";
  block_index?: number;
  depth?: number;
  reason?: string;
  execution_error?: string;
}

export interface ChainSummary {
  length: number;
  tip_index: number;
  tip_hash: string;
  pending: number;
  contract_address: string | null;
}

export interface SearchHit {
  student_id: string;
  display_name: string;
  entries: RecordEntry[];
}

export interface SubmitReceipt {
  cert_digest: string;
  tx_id: string;
  status: string;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  token: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const headers: Record<string, string> = { ...extra };
    if (this.token) headers["X-Session-Token"] = this.token;
    return headers;
  }

  private async request<T>(method: string, path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, { method, ...init });
    const text = await response.text();
    let body: unknown = null;
    if (text) {
      try {
        body = JSON.parse(text);
      } catch {
        throw new ApiError(response.status, "bad_response", `non-JSON response from ${path}`);
      }
    }
    if (!response.ok) {
      const err = (body ?? {}) as { error?: string; message?: string };
      throw new ApiError(response.status, err.error ?? "error", err.message ?? response.statusText);
    }
    return body as T;
  }

  private postJson<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>("POST", path, {
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(payload),
    });
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path, { headers: this.headers() });
  }

  async login(userId: string, secret: string): Promise<LoginResult> {
    const result = await this.postJson<LoginResult>("/login", { user_id: userId, secret });
    this.token = result.token;
    return result;
  }

  async logout(): Promise<void> {
    try {
      await this.postJson<{ ok: boolean }>("/logout", {});
    } finally {
      this.token = null;
    }
  }

  whoami(): Promise<WhoAmI> {
    return this.get<WhoAmI>("/whoami");
  }

  requestReset(userId: string): Promise<{ ok: boolean }> {
    return this.postJson("/reset/request", { user_id: userId });
  }

  applyReset(token: string, secret: string): Promise<{ ok: boolean }> {
    return this.postJson("/reset/apply", { token, secret });
  }

  registerUniversity(
    name: string,
    userId: string,
    email: string,
    secret: string,
  ): Promise<{ user_id: string; address: string; tx_id: string; status: string }> {
    return this.postJson("/admin/universities", { name, user_id: userId, email, secret });
  }

  addEmployer(userId: string, name: string, email: string, secret: string): Promise<unknown> {
    return this.postJson("/admin/employers", { user_id: userId, name, email, secret });
  }

  listUniversities(): Promise<{ universities: UniversityRow[]; names: string[] }> {
    return this.get("/universities");
  }

  addStudent(
    universityId: string,
    studentId: string,
    name: string,
    email: string,
    secret: string,
  ): Promise<unknown> {
    return this.postJson(`/universities/${encodeURIComponent(universityId)}/students`, {
      student_id: studentId,
      name,
      email,
      secret,
    });
  }

  uploadCertificate(
    universityId: string,
    metadata: { student_id: string; title: string; category: string },
    document: Blob,
    filename = "document",
  ): Promise<SubmitReceipt> {
    const form = new FormData();
    form.append("metadata", JSON.stringify(metadata));
    form.append("document", document, filename);
    return this.request<SubmitReceipt>(
      "POST",
      `/universities/${encodeURIComponent(universityId)}/certificates`,
      { headers: this.headers(), body: form },
    );
  }

  record(studentId: string): Promise<StudentRecord> {
    return this.get(`/students/${encodeURIComponent(studentId)}/record`);
  }

  search(filters: { category?: string; university?: string; keyword?: string }): Promise<{ results: SearchHit[] }> {
    const params = new URLSearchParams();
    if (filters.category) params.set("category", filters.category);
    if (filters.university) params.set("university", filters.university);
    if (filters.keyword) params.set("keyword", filters.keyword);
    const query = params.toString();
    return this.get(`/students/search${query ? "?" + query : ""}`);
  }

  outbox(): Promise<{ events: OutboxEvent[] }> {
    return this.get("/admin/outbox");
  }

  verifyDigest(digest: string): Promise<VerifyResult> {
    return this.postJson("/verify", { digest });
  }

  verifyDocument(document: Blob, filename = "document"): Promise<VerifyResult> {
    const form = new FormData();
    form.append("document", document, filename);
    return this.request<VerifyResult>("POST", "/verify", { headers: this.headers(), body: form });
  }

  chain(): Promise<ChainSummary> {
    return this.get("/chain");
  }

  txStatus(txId: string): Promise<TxStatus> {
    return this.get(`/chain/status/${encodeURIComponent(txId)}`);
  }

  faucet(address: string, amount: number): Promise<{ address: string; balance: number }> {
    return this.postJson("/admin/faucet", { address, amount });
  }
}
