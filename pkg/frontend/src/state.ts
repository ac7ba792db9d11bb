/**
 * Task progression and rating state for the study instrument.
 *
 * The flow is strictly sequential: the Next button only unlocks once every
 * required position of the current task has a server-confirmed rating.
 * Positions without a result (short result lists) are submitted as zero
 * stars automatically, matching how the analysis zero-pads short lists.
 * Progress survives a refresh via injected storage; the session is reused
 * and the flow resumes at the first task not yet completed.
 */

import { ApiClient, SearchResult, StudyTask } from "./api.js";

export type RatingStatus = "unrated" | "saving" | "saved" | "error";

export interface PositionState {
  position: number;
  result: SearchResult | null;
  stars: number | null;
  status: RatingStatus;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

interface PersistedProgress {
  sessionId: string;
  completedTaskIds: string[];
}

const STORAGE_KEY = "ogdsearch-study-progress";

export class StudyFlow {
  private tasks: StudyTask[] = [];
  private sessionId = "";
  private completedTaskIds = new Set<string>();
  private currentIndex = 0;
  positions: PositionState[] = [];
  lastError: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly storage?: StorageLike,
  ) {}

  get session(): string {
    return this.sessionId;
  }

  get currentTask(): StudyTask | null {
    return this.tasks[this.currentIndex] ?? null;
  }

  get finished(): boolean {
    return this.currentIndex >= this.tasks.length;
  }

  get progress(): { done: number; total: number } {
    return { done: this.currentIndex, total: this.tasks.length };
  }

  /** Every required position carries a server-confirmed rating. */
  get canAdvance(): boolean {
    return (
      this.positions.length > 0 &&
      this.positions.every((p) => p.status === "saved")
    );
  }

  async init(): Promise<void> {
    this.tasks = await this.api.getTasks();
    const restored = this.restore();
    if (restored) {
      this.sessionId = restored.sessionId;
      this.completedTaskIds = new Set(restored.completedTaskIds);
    } else {
      this.sessionId = await this.api.createSession();
      this.persist();
    }
    this.currentIndex = this.tasks.findIndex(
      (t) => !this.completedTaskIds.has(t.task_id),
    );
    if (this.currentIndex < 0) {
      this.currentIndex = this.tasks.length;
    }
  }

  /** Run the current task's scripted query and set up the rating slots. */
  async loadCurrentResults(): Promise<void> {
    const task = this.currentTask;
    if (!task) {
      this.positions = [];
      return;
    }
    this.lastError = null;
    const response = await this.api.search(
      task.theme_keyword,
      task.place_keyword,
      task.strategy,
      task.results_to_rate,
    );
    this.positions = [];
    for (let position = 1; position <= task.results_to_rate; position += 1) {
      this.positions.push({
        position,
        result: response.results[position - 1] ?? null,
        stars: null,
        status: "unrated",
      });
    }
    // short result lists: the absent positions count as zero relevance
    await Promise.all(
      this.positions
        .filter((p) => p.result === null)
        .map((p) => this.rate(p.position, 0)),
    );
  }

  async rate(position: number, stars: number): Promise<void> {
    const task = this.currentTask;
    const slot = this.positions[position - 1];
    if (!task || !slot || slot.position !== position) {
      throw new Error(`no rating slot for position ${position}`);
    }
    if (!Number.isInteger(stars) || stars < 0 || stars > 5) {
      throw new Error(`stars out of range: ${stars}`);
    }
    slot.stars = stars; // optimistic
    slot.status = "saving";
    try {
      await this.api.postRating({
        session_id: this.sessionId,
        task_id: task.task_id,
        position,
        dataset_id: slot.result?.dataset_id ?? "-",
        stars,
      });
      slot.status = "saved";
    } catch (error) {
      slot.status = "error";
      this.lastError = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  async advance(): Promise<void> {
    const task = this.currentTask;
    if (!task) {
      return;
    }
    if (!this.canAdvance) {
      throw new Error("cannot advance: unrated or unsaved positions remain");
    }
    this.completedTaskIds.add(task.task_id);
    this.persist();
    this.currentIndex += 1;
    this.positions = [];
  }

  reset(): void {
    this.storage?.removeItem(STORAGE_KEY);
  }

  private restore(): PersistedProgress | null {
    const raw = this.storage?.getItem(STORAGE_KEY);
    if (!raw) {
      return null;
    }
    try {
      const parsed = JSON.parse(raw) as PersistedProgress;
      return parsed.sessionId ? parsed : null;
    } catch {
      return null;
    }
  }

  private persist(): void {
    this.storage?.setItem(
      STORAGE_KEY,
      JSON.stringify({
        sessionId: this.sessionId,
        completedTaskIds: [...this.completedTaskIds],
      } satisfies PersistedProgress),
    );
  }
}
