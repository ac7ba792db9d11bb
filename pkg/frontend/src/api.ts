/**
 * Typed client for the study API. All server communication goes through
 * this module; the UI never computes scores or rankings itself.
 */

export interface StudyTask {
  task_id: string;
  query_id: string;
  topic: string;
  theme_keyword: string;
  place_keyword: string;
  strategy: string;
  results_to_rate: number;
}

export interface SearchResult {
  rank: number;
  dataset_id: string;
  title: string;
  description: string;
  portal: string;
  aggregate: number;
}

export interface SearchResponse {
  strategy: string;
  theme: string;
  place: string;
  elapsed_ms: number;
  total_results: number;
  results: SearchResult[];
}

export interface RatingSubmission {
  session_id: string;
  task_id: string;
  position: number;
  dataset_id: string;
  stars: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? fetch.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let code = "HTTP_ERROR";
      let message = `${response.status} for ${path}`;
      try {
        const body = (await response.json()) as { error?: string; message?: string };
        code = body.error ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body: keep the generic message
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  getTasks(): Promise<StudyTask[]> {
    return this.request<StudyTask[]>("/api/tasks");
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("/api/sessions", {
      method: "POST",
    });
    return body.session_id;
  }

  search(theme: string, place: string, strategy: string, k: number): Promise<SearchResponse> {
    const params = new URLSearchParams({
      theme,
      place,
      strategy,
      k: String(k),
    });
    return this.request<SearchResponse>(`/api/search?${params.toString()}`);
  }

  async postRating(submission: RatingSubmission): Promise<void> {
    await this.request<{ status: string }>("/api/ratings", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
  }

  async exportCsv(): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/export/ratings.csv`);
    if (!response.ok) {
      throw new ApiError(response.status, "HTTP_ERROR", "export failed");
    }
    return response.text();
  }
}
