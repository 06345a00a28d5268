import { fromRaw, insertMarkdown, toRaw, type NotebookView } from "./notebook.js";
import type {
  Badge,
  CandidateKind,
  SuggestApi,
  SuggestionCandidate,
} from "./types.js";

export interface UiState {
  notebook: NotebookView | null;
  focusedCellId: string | null;
  /** lightbulb is shown iff a focused code cell has candidates loaded */
  lightbulbVisible: boolean;
  /** non-null only while the dropdown is open on the focused code cell */
  openDropdown: SuggestionCandidate[] | null;
  dirty: boolean;
  badges: Record<string, Badge>;
  toast: string | null;
}

interface PendingSuggestion {
  kind: CandidateKind;
  text: string;
}

export type Listener = (state: UiState) => void;

/**
 * All client behavior behind the rendered notebook: focus-driven
 * suggestion requests (stale responses dropped), dropdown handling,
 * markdown insertion at the service-returned placement, and provenance
 * feedback on save. Candidate text is never produced locally; it only
 * ever comes out of the suggest endpoint's response.
 */
export class NotebookEditor {
  state: UiState = {
    notebook: null,
    focusedCellId: null,
    lightbulbVisible: false,
    openDropdown: null,
    dirty: false,
    badges: {},
    toast: null,
  };

  private candidates: SuggestionCandidate[] = [];
  private suggestSeq = 0;
  private pending = new Map<string, PendingSuggestion | null>();
  private listeners: Listener[] = [];

  constructor(private readonly api: SuggestApi) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(partial: Partial<UiState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  async load(path: string): Promise<void> {
    const raw = await this.api.getNotebook(path);
    this.update({
      notebook: fromRaw(path, raw),
      focusedCellId: null,
      lightbulbVisible: false,
      openDropdown: null,
      dirty: false,
      badges: {},
    });
  }

  async onFocusChange(cellId: string): Promise<void> {
    const cell = this.state.notebook?.cells.find((c) => c.id === cellId);
    this.update({ focusedCellId: cellId, openDropdown: null, lightbulbVisible: false });
    if (!cell || cell.kind !== "code") return;
    const seq = ++this.suggestSeq;
    try {
      const response = await this.api.suggest(cell.source, cell.outputKind);
      if (seq !== this.suggestSeq || this.state.focusedCellId !== cellId) {
        return; // a newer focus superseded this request
      }
      this.candidates = response.candidates;
      this.update({ lightbulbVisible: response.candidates.length > 0 });
    } catch (error) {
      if (seq !== this.suggestSeq) return;
      this.candidates = [];
      this.update({ lightbulbVisible: false, toast: `suggestions unavailable: ${error}` });
    }
  }

  openDropdown(): void {
    const cell = this.state.notebook?.cells.find(
      (c) => c.id === this.state.focusedCellId,
    );
    if (!cell || cell.kind !== "code" || this.candidates.length === 0) return;
    this.update({ openDropdown: this.candidates });
  }

  dismissDropdown(): void {
    this.update({ openDropdown: null });
  }

  /** Insert the chosen candidate's markdown at its placement. */
  selectCandidate(index: number): string | null {
    const candidate = this.state.openDropdown?.[index];
    const anchor = this.state.focusedCellId;
    if (!candidate || !anchor || !this.state.notebook) return null;
    const result = insertMarkdown(
      this.state.notebook,
      anchor,
      candidate.text,
      candidate.placement,
    );
    if (result === null) {
      this.update({ openDropdown: null, toast: "cell no longer exists" });
      return null;
    }
    this.pending.set(result.inserted.id, { kind: candidate.kind, text: candidate.text });
    this.update({ notebook: result.notebook, openDropdown: null, dirty: true });
    return result.inserted.id;
  }

  /** Manual markdown written without taking a suggestion. */
  insertManualMarkdown(anchorId: string, text: string): string | null {
    if (!this.state.notebook) return null;
    const result = insertMarkdown(this.state.notebook, anchorId, text, "above");
    if (result === null) return null;
    this.pending.set(result.inserted.id, null);
    this.update({ notebook: result.notebook, openDropdown: null, dirty: true });
    return result.inserted.id;
  }

  editCell(cellId: string, source: string): void {
    if (!this.state.notebook) return;
    const cells = this.state.notebook.cells.map((c) =>
      c.id === cellId ? { ...c, source } : c,
    );
    this.update({ notebook: { ...this.state.notebook, cells }, dirty: true });
  }

  /**
   * Blur/save on a markdown cell: report provenance feedback, persist the
   * whole notebook, and re-render from the server's copy.
   */
  async saveMarkdown(cellId: string): Promise<Badge | null> {
    const notebook = this.state.notebook;
    const cell = notebook?.cells.find((c) => c.id === cellId);
    if (!notebook || !cell) return null;
    const suggestion = this.pending.get(cellId) ?? null;
    const feedback = await this.api.feedback(
      cellId,
      suggestion?.kind ?? null,
      suggestion?.text ?? "",
      cell.source,
    );
    this.pending.delete(cellId);
    await this.api.putNotebook(notebook.path, toRaw(notebook));
    const serverCopy = await this.api.getNotebook(notebook.path);
    this.update({
      notebook: fromRaw(notebook.path, serverCopy),
      dirty: false,
      badges: { ...this.state.badges, [cellId]: feedback.provenance },
    });
    return feedback.provenance;
  }
}

/** "The table shows _ _ _ _ _" -> text before the blanks plus caret offset. */
export function promptEditSeed(text: string): { text: string; caret: number } {
  const blank = text.indexOf("_");
  if (blank < 0) return { text, caret: text.length };
  const prefix = text.slice(0, blank).trimEnd() + " ";
  return { text: prefix, caret: prefix.length };
}
