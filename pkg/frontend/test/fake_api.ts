// In-memory stand-in for the annotation server, for unit tests.

import { ApiClient, ApiError, Progress, Rating, TaskCard, TasksResponse } from "../src/api";

export class FakeApi extends ApiClient {
  ratings = new Map<string, Rating>();
  offline = false;

  constructor(public cards: TaskCard[]) {
    super("");
  }

  private ensureOnline(): void {
    if (this.offline) {
      throw new TypeError("fetch failed");
    }
  }

  override async listTasks(
    offset: number,
    limit: number,
    onlyUnannotated = true,
  ): Promise<TasksResponse> {
    this.ensureOnline();
    const pool = onlyUnannotated
      ? this.cards.filter((c) => !this.ratings.has(c.task_id))
      : this.cards;
    return {
      tasks: pool.slice(offset, offset + limit).map((c) => ({
        ...c,
        annotated: this.ratings.has(c.task_id),
      })),
      total: this.cards.length,
      annotated_count: this.ratings.size,
    };
  }

  override async submitRating(taskId: string, rating: Rating): Promise<{ ok: boolean }> {
    this.ensureOnline();
    if (![0, 1, 2].includes(rating)) {
      throw new ApiError(422, "rating must be 0, 1 or 2");
    }
    if (!this.cards.some((c) => c.task_id === taskId)) {
      throw new ApiError(404, `unknown task_id '${taskId}'`);
    }
    this.ratings.set(taskId, rating);
    return { ok: true };
  }

  override async progress(): Promise<Progress> {
    this.ensureOnline();
    const by: Record<"0" | "1" | "2", number> = { "0": 0, "1": 0, "2": 0 };
    for (const rating of this.ratings.values()) {
      by[String(rating) as "0" | "1" | "2"] += 1;
    }
    return {
      total: this.cards.length,
      annotated_count: this.ratings.size,
      by_rating: by,
    };
  }
}

export function makeCards(count: number, examplesEach = 6): TaskCard[] {
  return Array.from({ length: count }, (_, i) => ({
    task_id: `site${i}.example.com__000000000000000${i.toString(16)}__col1`,
    website: `site${i}.example.com`,
    target_header: "answer",
    examples: Array.from({ length: Math.min(examplesEach, 10) }, (_, j) => ({
      input: `[question] item ${j} of task ${i} [answer] `,
      output: `output ${j}`,
    })),
    example_count: examplesEach,
    annotated: false,
  }));
}
