import type {
  CandidateKind,
  FeedbackResponse,
  HealthResponse,
  NbRawNotebook,
  OutputKind,
  SuggestApi,
  SuggestResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** fetch-based client for the suggestion service HTTP/JSON API. */
export class HttpClient implements SuggestApi {
  constructor(private readonly baseUrl: string) {}

  health(): Promise<HealthResponse> {
    return fetch(`${this.baseUrl}/api/health`).then((r) => asJson<HealthResponse>(r));
  }

  suggest(source: string, outputKind: OutputKind | null): Promise<SuggestResponse> {
    return fetch(`${this.baseUrl}/api/suggest`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ source, output_kind: outputKind }),
    }).then((r) => asJson<SuggestResponse>(r));
  }

  getNotebook(path: string): Promise<NbRawNotebook> {
    const query = new URLSearchParams({ path });
    return fetch(`${this.baseUrl}/api/notebook?${query}`).then((r) =>
      asJson<NbRawNotebook>(r),
    );
  }

  async putNotebook(path: string, notebook: NbRawNotebook): Promise<void> {
    const query = new URLSearchParams({ path });
    await asJson<{ ok: boolean }>(
      await fetch(`${this.baseUrl}/api/notebook?${query}`, {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(notebook),
      }),
    );
  }

  feedback(
    cellId: string,
    suggestionKind: CandidateKind | null,
    suggestedText: string,
    finalText: string,
  ): Promise<FeedbackResponse> {
    return fetch(`${this.baseUrl}/api/feedback`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        cell_id: cellId,
        suggestion_kind: suggestionKind,
        suggested_text: suggestedText,
        final_text: finalText,
      }),
    }).then((r) => asJson<FeedbackResponse>(r));
  }
}
