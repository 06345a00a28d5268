export type CandidateKind = "Deep" | "Query" | "Prompt";
export type Placement = "above" | "below";
export type OutputKind = "table" | "text" | "image" | "error";
export type Badge = "T" | "C" | "H";

export interface SuggestionCandidate {
  kind: CandidateKind;
  text: string;
  placement: Placement;
  category: string;
}

export interface SuggestResponse {
  candidates: SuggestionCandidate[];
  warnings: string[];
}

export interface FeedbackResponse {
  provenance: Badge;
  similarity: number;
}

export interface HealthResponse {
  status: string;
  model_loaded: boolean;
}

/** Raw nbformat-4 shapes, as served by GET /api/notebook. */
export interface NbRawOutput {
  output_type: string;
  data?: Record<string, unknown>;
  [key: string]: unknown;
}

export interface NbRawCell {
  cell_type: "code" | "markdown";
  id?: string;
  source: string | string[];
  metadata: Record<string, unknown>;
  outputs?: NbRawOutput[];
  [key: string]: unknown;
}

export interface NbRawNotebook {
  cells: NbRawCell[];
  metadata: Record<string, unknown>;
  nbformat: number;
  nbformat_minor: number;
}

/** The client-side API surface; the DOM layer and tests share it. */
export interface SuggestApi {
  health(): Promise<HealthResponse>;
  suggest(source: string, outputKind: OutputKind | null): Promise<SuggestResponse>;
  getNotebook(path: string): Promise<NbRawNotebook>;
  putNotebook(path: string, notebook: NbRawNotebook): Promise<void>;
  feedback(
    cellId: string,
    suggestionKind: CandidateKind | null,
    suggestedText: string,
    finalText: string,
  ): Promise<FeedbackResponse>;
}
