import { HttpClient } from "./api.js";
import { NotebookEditor, promptEditSeed, type UiState } from "./state.js";

const editor = new NotebookEditor(
  new HttpClient(window.location.origin.replace(/:\d+$/, ":8600")),
);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function render(state: UiState): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();
  if (state.toast) root.appendChild(el("div", "toast", state.toast));
  if (!state.notebook) {
    root.appendChild(el("p", "empty", "No notebook loaded."));
    return;
  }
  for (const cell of state.notebook.cells) {
    const row = el("div", `cell ${cell.kind}`);
    row.dataset.cellId = cell.id;
    const focused = cell.id === state.focusedCellId;
    if (focused && state.lightbulbVisible) {
      const bulb = el("button", "lightbulb", "\u{1F4A1}");
      bulb.addEventListener("click", () => editor.openDropdown());
      row.appendChild(bulb);
    }
    const badge = state.badges[cell.id];
    if (badge) row.appendChild(el("span", `badge badge-${badge}`, badge));
    const body = el(cell.kind === "code" ? "pre" : "div", "source", cell.source);
    body.tabIndex = 0;
    body.addEventListener("focus", () => void editor.onFocusChange(cell.id));
    if (cell.kind === "markdown") {
      body.contentEditable = "true";
      body.addEventListener("input", () =>
        editor.editCell(cell.id, body.textContent ?? ""),
      );
      body.addEventListener("blur", () => void editor.saveMarkdown(cell.id));
    }
    row.appendChild(body);
    if (focused && state.openDropdown) {
      const menu = el("ul", "dropdown");
      state.openDropdown.forEach((candidate, index) => {
        const item = el("li", "candidate");
        item.appendChild(el("span", "kind", candidate.kind));
        const seed =
          candidate.kind === "Prompt" ? promptEditSeed(candidate.text).text : candidate.text;
        item.appendChild(el("span", "text", seed));
        item.addEventListener("click", () => editor.selectCandidate(index));
        menu.appendChild(item);
      });
      row.appendChild(menu);
    }
    root.appendChild(row);
  }
}

editor.subscribe(render);

const params = new URLSearchParams(window.location.search);
const path = params.get("notebook") ?? "house.ipynb";
void editor.load(path).catch((error) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to load ${path}: ${error}`;
});
