// Typed client for the annotation server's JSON API.

export type Rating = 0 | 1 | 2;

export interface TaskExample {
  input: string;
  output: string;
}

export interface TaskCard {
  task_id: string;
  website: string;
  target_header: string;
  examples: TaskExample[];
  example_count: number;
  annotated: boolean;
}

export interface TasksResponse {
  tasks: TaskCard[];
  total: number;
  annotated_count: number;
}

export interface Progress {
  total: number;
  annotated_count: number;
  by_rating: Record<"0" | "1" | "2", number>;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Server answered with a non-OK status (carries the body's error text). */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      // non-JSON body; fall through with the status alone
    }
    if (!resp.ok) {
      const message =
        body && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, message);
    }
    return body as T;
  }

  listTasks(offset: number, limit: number, onlyUnannotated = true): Promise<TasksResponse> {
    const params = new URLSearchParams({
      offset: String(offset),
      limit: String(limit),
      only_unannotated: onlyUnannotated ? "true" : "false",
    });
    return this.request<TasksResponse>(`/api/tasks?${params}`);
  }

  submitRating(taskId: string, rating: Rating, notes?: string): Promise<{ ok: boolean }> {
    return this.request<{ ok: boolean }>("/api/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(notes === undefined ? { task_id: taskId, rating } : { task_id: taskId, rating, notes }),
    });
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/api/progress");
  }
}
