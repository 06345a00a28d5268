import type { NbRawCell, NbRawNotebook, OutputKind, Placement } from "./types.js";

export interface CellView {
  id: string;
  kind: "code" | "markdown";
  source: string;
  outputKind: OutputKind | null;
  /** raw record preserved so saving loses nothing the client doesn't model */
  raw: NbRawCell;
}

export interface NotebookView {
  path: string;
  cells: CellView[];
  raw: NbRawNotebook;
}

function joinSource(source: string | string[]): string {
  return Array.isArray(source) ? source.join("") : source;
}

function classifyOutput(cell: NbRawCell): OutputKind | null {
  for (const output of cell.outputs ?? []) {
    if (output.output_type === "error") return "error";
    if (output.output_type === "stream") return "text";
    const data = output.data ?? {};
    if ("text/html" in data) return "table";
    if (Object.keys(data).some((mime) => mime.startsWith("image/"))) return "image";
    if (Object.keys(data).length > 0) return "text";
  }
  return null;
}

export function fromRaw(path: string, raw: NbRawNotebook): NotebookView {
  const cells = raw.cells.map((cell, index) => ({
    id: cell.id ?? `cell-${index}`,
    kind: cell.cell_type,
    source: joinSource(cell.source),
    outputKind: cell.cell_type === "code" ? classifyOutput(cell) : null,
    raw: cell,
  }));
  return { path, cells, raw };
}

export function toRaw(notebook: NotebookView): NbRawNotebook {
  return {
    ...notebook.raw,
    cells: notebook.cells.map((cell) => ({
      ...cell.raw,
      id: cell.id,
      source: cell.source,
    })),
  };
}

let freshCounter = 0;

export function freshMarkdownCell(source: string): CellView {
  freshCounter += 1;
  const id = `md-ui-${Date.now().toString(36)}-${freshCounter}`;
  const raw: NbRawCell = { cell_type: "markdown", id, source, metadata: {} };
  return { id, kind: "markdown", source, outputKind: null, raw };
}

/**
 * Insert a markdown cell directly above or below the anchor code cell.
 * Returns the new notebook and the inserted cell, or null when the anchor
 * no longer exists (e.g. deleted between suggestion and acceptance).
 */
export function insertMarkdown(
  notebook: NotebookView,
  anchorId: string,
  text: string,
  placement: Placement,
): { notebook: NotebookView; inserted: CellView } | null {
  const index = notebook.cells.findIndex((c) => c.id === anchorId);
  if (index < 0 || notebook.cells[index]?.kind !== "code") return null;
  const inserted = freshMarkdownCell(text);
  const at = placement === "above" ? index : index + 1;
  const cells = [...notebook.cells.slice(0, at), inserted, ...notebook.cells.slice(at)];
  return { notebook: { ...notebook, cells }, inserted };
}
