// Annotation session state machine.
//
// Holds the task being rated, a history stack for undo, an offline retry
// queue, and the latest server progress. All server writes go through
// rate(); the server is the source of truth (refreshing the page loses
// nothing), and a re-rating of the same task last-wins on the server so
// undo is just "go back and submit again".

import { ApiClient, ApiError, Progress, Rating, TaskCard } from "./api";

export interface QueuedSubmission {
  taskId: string;
  rating: Rating;
}

export type Banner =
  | { kind: "none" }
  | { kind: "error"; message: string; retryable: boolean }
  | { kind: "validation"; message: string };

export interface SessionSnapshot {
  current: TaskCard | null;
  progress: Progress | null;
  banner: Banner;
  queueLength: number;
  done: boolean;
  /** True while a submission round-trip is in flight; key presses are
   * ignored until it clears, so drivers should wait on it. */
  busy: boolean;
}

type Listener = (snapshot: SessionSnapshot) => void;

export class AnnotationSession {
  private current: TaskCard | null = null;
  private history: TaskCard[] = [];
  private progress: Progress | null = null;
  private banner: Banner = { kind: "none" };
  private queue: QueuedSubmission[] = [];
  private done = false;
  private listeners: Listener[] = [];
  private busy = false;

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  snapshot(): SessionSnapshot {
    return {
      current: this.current,
      progress: this.progress,
      banner: this.banner,
      queueLength: this.queue.length,
      done: this.done,
      busy: this.busy,
    };
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const listener of this.listeners) {
      listener(snap);
    }
  }

  /** Load progress plus the first unannotated task. */
  async start(): Promise<void> {
    try {
      this.progress = await this.api.progress();
      await this.advance();
      this.banner = { kind: "none" };
    } catch (err) {
      this.banner = { kind: "error", message: describe(err), retryable: true };
    }
    this.emit();
  }

  /** Fetch the next unannotated task (or mark the session done). */
  private async advance(): Promise<void> {
    const resp = await this.api.listTasks(0, 1, true);
    this.progress = {
      total: resp.total,
      annotated_count: resp.annotated_count,
      by_rating: this.progress?.by_rating ?? { "0": 0, "1": 0, "2": 0 },
    };
    if (resp.tasks.length === 0) {
      this.current = null;
      this.done = true;
    } else {
      this.current = resp.tasks[0];
      this.done = false;
    }
  }

  /** Submit a rating for the displayed task and move on. */
  async rate(rating: Rating): Promise<void> {
    if (!this.current || this.busy) {
      return;
    }
    this.busy = true;
    const task = this.current;
    try {
      await this.api.submitRating(task.task_id, rating);
      this.history.push(task);
      this.progress = await this.api.progress();
      await this.advance();
      this.banner = { kind: "none" };
      await this.flushQueue();
    } catch (err) {
      if (err instanceof ApiError) {
        // the server refused the submission; surface it, queue nothing
        this.banner = { kind: "validation", message: err.message };
      } else {
        // network failure: queue for retry so the click is never lost
        this.queue.push({ taskId: task.task_id, rating });
        this.banner = { kind: "error", message: describe(err), retryable: true };
      }
    } finally {
      this.busy = false;
    }
    this.emit();
  }

  /** Re-display the most recently rated task so it can be re-rated. */
  async undo(): Promise<void> {
    const previous = this.history.pop();
    if (!previous) {
      return;
    }
    try {
      // refetch the card with annotated=true semantics (it may no longer
      // be in the unannotated list)
      const resp = await this.api.listTasks(0, 1000, false);
      const fresh = resp.tasks.find((t) => t.task_id === previous.task_id);
      this.current = fresh ?? previous;
      this.done = false;
      this.banner = { kind: "none" };
    } catch (err) {
      this.current = previous;
      this.banner = { kind: "error", message: describe(err), retryable: true };
    }
    this.emit();
  }

  /** Retry queued submissions (called after reconnecting). */
  async flushQueue(): Promise<void> {
    if (this.queue.length === 0) {
      return;
    }
    while (this.queue.length > 0) {
      const head = this.queue[0];
      try {
        await this.api.submitRating(head.taskId, head.rating);
        this.queue.shift();
      } catch (err) {
        if (err instanceof ApiError) {
          // permanently rejected; drop it rather than loop forever
          this.queue.shift();
          this.banner = { kind: "validation", message: err.message };
        }
        break;
      }
    }
    this.progress = await this.api.progress().catch(() => this.progress);
    this.emit();
  }

  async retry(): Promise<void> {
    await this.flushQueue();
    if (!this.current && !this.done) {
      await this.start();
    } else {
      this.emit();
    }
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
