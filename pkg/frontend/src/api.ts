/** Typed client for the revision service HTTP API. */

export interface SessionSummary {
  session_id: string;
  issue_counts: Record<string, number>;
}

export interface FileEntry {
  file_location: string;
  issue_count: number;
  counts: Record<string, number>;
}

export interface IssueInfo {
  file_location: string;
  file_name: string;
  line: number;
  message: string;
  type: string;
}

export interface FileDetail {
  file_location: string;
  content: string;
  issues: IssueInfo[];
}

export interface PromptSpec {
  system_text: string;
  user_text: string;
  language_tag: string;
  editable: boolean;
}

export type PromptMode = "batch" | "interactive";

export interface ReviseRequest {
  file_location: string;
  model_id: string;
  mode: PromptMode;
  prompt_override?: string;
}

export interface RevisionInfo {
  file_location: string;
  model_id: string;
  status: "Revised" | "Unchanged" | "Failed";
  revised_content: string;
  prompt_tokens: number;
  completion_tokens: number;
  cost_usd: string;
  diagnostic: string;
}

export type DiffRowKind = "unchanged" | "removed" | "added";

export interface DiffRow {
  kind: DiffRowKind;
  original_line_no: number | null;
  revised_line_no: number | null;
  text: string;
}

export interface Metrics {
  matched: number;
  removed: number;
  added: number;
  precision: number;
  recall: number;
  f1: number;
}

export interface RevisePayload {
  revision: RevisionInfo;
  diff: DiffRow[];
  metrics: Metrics;
}

export interface LedgerRow {
  issue_type: string;
  strategy: string;
  total: number;
  resolved: number;
  cost_usd: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let detail = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async uploadCsv(csv: Blob | string): Promise<SessionSummary> {
    const response = await fetch(this.url("/api/sessions"), {
      method: "POST",
      body: csv,
      headers: { "Content-Type": "text/csv" },
    });
    return parseOrThrow(response);
  }

  async listFiles(sessionId: string): Promise<FileEntry[]> {
    return parseOrThrow(await fetch(this.url(`/api/sessions/${sessionId}/files`)));
  }

  async getFile(sessionId: string, fileLocation: string): Promise<FileDetail> {
    return parseOrThrow(
      await fetch(this.url(`/api/sessions/${sessionId}/files/${fileLocation}`))
    );
  }

  async previewPrompt(
    sessionId: string,
    fileLocation: string,
    mode: PromptMode
  ): Promise<PromptSpec> {
    const response = await fetch(this.url(`/api/sessions/${sessionId}/prompt/preview`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ file_location: fileLocation, mode }),
    });
    return parseOrThrow(response);
  }

  async revise(sessionId: string, request: ReviseRequest): Promise<RevisePayload> {
    const response = await fetch(this.url(`/api/sessions/${sessionId}/revise`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return parseOrThrow(response);
  }

  async saveRevision(sessionId: string, fileLocation: string): Promise<{ saved_path: string }> {
    const response = await fetch(this.url(`/api/sessions/${sessionId}/save`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ file_location: fileLocation }),
    });
    return parseOrThrow(response);
  }

  async report(sessionId: string): Promise<{ rows: LedgerRow[] }> {
    return parseOrThrow(await fetch(this.url(`/api/sessions/${sessionId}/report`)));
  }

  async models(): Promise<string[]> {
    const body = await parseOrThrow<{ models: string[] }>(
      await fetch(this.url("/api/models"))
    );
    return body.models;
  }
}
