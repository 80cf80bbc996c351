/** Prompt editor with model picker and run button.
 *
 * Batch mode keeps the prewritten prompt read-only; interactive mode lets the
 * user edit it, and an edited prompt is sent verbatim as the override. One
 * revision may be in flight at a time (the run button is disabled while busy).
 */

import type { PromptMode, PromptSpec } from "../api";
import { el } from "../format";

export interface PromptPanelOptions {
  prompt: PromptSpec;
  models: string[];
  selectedModel: string;
  mode: PromptMode;
  busy: boolean;
  onRun: (request: { model_id: string; prompt_override?: string }) => void;
  onModeChange: (mode: PromptMode) => void;
}

export function renderPromptPanel(options: PromptPanelOptions): HTMLElement {
  const panel = el("div", "prompt-panel");

  const modeRow = el("div", "mode-row");
  for (const mode of ["interactive", "batch"] as PromptMode[]) {
    const label = el("label", "mode-choice");
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "prompt-mode";
    radio.value = mode;
    radio.checked = options.mode === mode;
    radio.addEventListener("change", () => options.onModeChange(mode));
    label.append(radio, document.createTextNode(mode));
    modeRow.append(label);
  }
  panel.append(modeRow);

  const textarea = el("textarea", "prompt-text") as HTMLTextAreaElement;
  textarea.value = options.prompt.user_text;
  textarea.rows = 14;
  textarea.disabled = !options.prompt.editable;
  panel.append(textarea);

  const controls = el("div", "prompt-controls");
  const select = el("select", "model-select") as HTMLSelectElement;
  for (const model of options.models) {
    const option = el("option", "", model) as HTMLOptionElement;
    option.value = model;
    option.selected = model === options.selectedModel;
    select.append(option);
  }
  const run = el("button", "run-button", options.busy ? "Running…" : "Run revision") as HTMLButtonElement;
  run.disabled = options.busy;
  run.addEventListener("click", () => {
    if (run.disabled) return;
    const edited = options.prompt.editable && textarea.value !== options.prompt.user_text;
    options.onRun({
      model_id: select.value,
      ...(edited ? { prompt_override: textarea.value } : {}),
    });
  });
  controls.append(select, run);
  panel.append(controls);

  const tag = el("div", "language-tag", `language: ${options.prompt.language_tag}`);
  panel.append(tag);
  return panel;
}
