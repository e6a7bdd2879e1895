/** Typed client for the passage-search service endpoints. */

export interface Lecture {
  lecture_id: string;
  n_units: number;
  start_ms: number;
  end_ms: number;
  has_textbook: boolean;
}

export interface Paragraph {
  paragraph_id: number;
  text: string;
}

export interface TranscriptUnit {
  unit_id: number;
  start_ms: number;
  end_ms: number;
  text: string;
}

export interface ResultGroup {
  rank: number;
  score: number;
  lecture_id: string;
  start_ms: number;
  end_ms: number;
  unit_ids: number[];
  snippet: string;
  media_url?: string;
}

export interface QueryResponse {
  query: string;
  top_n: number;
  pool_size: number;
  groups: ResultGroup[];
}

export interface QueryOptions {
  topN?: number;
  poolSize?: number;
  lecture?: string;
}

export class ServiceError extends Error {
  constructor(readonly code: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let message = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(resp.status, message);
    }
    return (await resp.json()) as T;
  }

  async lectures(): Promise<Lecture[]> {
    const body = await this.request<{ lectures: Lecture[] }>("/lectures");
    return body.lectures;
  }

  async textbook(lectureId: string): Promise<Paragraph[]> {
    const body = await this.request<{ paragraphs: Paragraph[] }>(
      `/lectures/${encodeURIComponent(lectureId)}/textbook`,
    );
    return body.paragraphs;
  }

  async units(lectureId: string, from: number, to: number): Promise<TranscriptUnit[]> {
    const body = await this.request<{ units: TranscriptUnit[] }>(
      `/lectures/${encodeURIComponent(lectureId)}/units?from=${from}&to=${to}`,
    );
    return body.units;
  }

  async query(text: string, options: QueryOptions = {}): Promise<QueryResponse> {
    return this.request<QueryResponse>("/query", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        text,
        top_n: options.topN,
        pool_size: options.poolSize,
        lecture: options.lecture,
      }),
    });
  }
}
