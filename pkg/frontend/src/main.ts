/** Single-page wiring: upload -> browse -> prompt -> revise -> diff -> save.
 * All state lives in this tab; every number shown comes from the service. */

import {
  ApiClient,
  ApiError,
  type FileDetail,
  type FileEntry,
  type PromptMode,
  type PromptSpec,
  type RevisePayload,
  type SessionSummary,
} from "./api";
import { renderDiffView } from "./components/diffView";
import { renderFileList } from "./components/fileList";
import { renderMetricsPanel } from "./components/metricsPanel";
import { renderPromptPanel } from "./components/promptPanel";
import { renderUploadPanel } from "./components/uploadPanel";
import { el, formatUsd } from "./format";

interface AppState {
  summary: SessionSummary | null;
  files: FileEntry[];
  selected: string | null;
  detail: FileDetail | null;
  prompt: PromptSpec | null;
  mode: PromptMode;
  models: string[];
  selectedModel: string;
  payload: RevisePayload | null;
  savedPath: string | null;
  runningCost: number;
  inFlight: Set<string>;
  error: string | null;
}

export interface AppActions {
  handleCsv: (content: string) => Promise<void>;
  selectFile: (location: string) => Promise<void>;
  changeMode: (mode: PromptMode) => Promise<void>;
  runRevision: (request: { model_id: string; prompt_override?: string }) => Promise<void>;
  saveRevision: () => Promise<void>;
}

export function createApp(
  root: HTMLElement,
  client: ApiClient
): { state: AppState; render: () => void; actions: AppActions } {
  const state: AppState = {
    summary: null,
    files: [],
    selected: null,
    detail: null,
    prompt: null,
    mode: "interactive",
    models: [],
    selectedModel: "",
    payload: null,
    savedPath: null,
    runningCost: 0,
    inFlight: new Set(),
    error: null,
  };

  function fail(error: unknown) {
    state.error = error instanceof ApiError ? error.message : String(error);
    render();
  }

  async function handleCsv(content: string) {
    try {
      state.error = null;
      state.summary = await client.uploadCsv(content);
      state.files = await client.listFiles(state.summary.session_id);
      state.models = await client.models();
      state.selectedModel = state.models[0] ?? "";
      state.selected = null;
      state.detail = null;
      state.prompt = null;
      state.payload = null;
      render();
    } catch (error) {
      fail(error);
    }
  }

  async function selectFile(location: string) {
    if (!state.summary) return;
    try {
      state.error = null;
      state.selected = location;
      state.payload = null;
      state.savedPath = null;
      state.detail = await client.getFile(state.summary.session_id, location);
      state.prompt = await client.previewPrompt(state.summary.session_id, location, state.mode);
      render();
    } catch (error) {
      fail(error);
    }
  }

  async function changeMode(mode: PromptMode) {
    state.mode = mode;
    if (state.summary && state.selected) {
      try {
        state.prompt = await client.previewPrompt(state.summary.session_id, state.selected, mode);
      } catch (error) {
        fail(error);
        return;
      }
    }
    render();
  }

  async function runRevision(request: { model_id: string; prompt_override?: string }) {
    if (!state.summary || !state.selected) return;
    // one in-flight revision per file, enforced client-side too
    if (state.inFlight.has(state.selected)) return;
    state.inFlight.add(state.selected);
    state.selectedModel = request.model_id;
    state.error = null;
    render();
    try {
      const payload = await client.revise(state.summary.session_id, {
        file_location: state.selected,
        model_id: request.model_id,
        mode: state.mode,
        ...(request.prompt_override !== undefined
          ? { prompt_override: request.prompt_override }
          : {}),
      });
      state.payload = payload;
      state.savedPath = null;
      state.runningCost += Number(payload.revision.cost_usd);
    } catch (error) {
      state.error = error instanceof ApiError ? error.message : String(error);
    } finally {
      state.inFlight.delete(state.selected);
      render();
    }
  }

  async function saveRevision() {
    if (!state.summary || !state.selected) return;
    try {
      const saved = await client.saveRevision(state.summary.session_id, state.selected);
      state.savedPath = saved.saved_path;
      state.error = null;
    } catch (error) {
      state.error = error instanceof ApiError ? error.message : String(error);
    }
    render();
  }

  function render() {
    root.replaceChildren();
    const header = el("header", "app-header");
    header.append(el("h1", "", "Code issue reviser"));
    header.append(el("span", "running-cost", `session cost: ${formatUsd(state.runningCost)}`));
    root.append(header);

    if (state.error) {
      root.append(el("div", "toast toast-error", state.error));
    }

    root.append(renderUploadPanel(state.summary, handleCsv));

    if (state.summary) {
      const columns = el("div", "columns");
      const left = el("div", "column column-files");
      left.append(renderFileList(state.files, state.selected, selectFile));
      columns.append(left);

      const right = el("div", "column column-work");
      if (state.prompt && state.selected) {
        right.append(
          renderPromptPanel({
            prompt: state.prompt,
            models: state.models,
            selectedModel: state.selectedModel,
            mode: state.mode,
            busy: state.inFlight.has(state.selected),
            onRun: runRevision,
            onModeChange: changeMode,
          })
        );
      } else {
        right.append(el("div", "empty-state", "Select a file to see its prompt."));
      }

      if (state.payload) {
        right.append(renderMetricsPanel(state.payload.metrics));
        right.append(renderDiffView(state.payload.diff));
        const saveRow = el("div", "save-row");
        const save = el("button", "save-button", "Save revision") as HTMLButtonElement;
        save.disabled = state.payload.revision.status !== "Revised";
        save.addEventListener("click", saveRevision);
        saveRow.append(save);
        if (state.savedPath) {
          saveRow.append(el("span", "saved-path", `saved: ${state.savedPath}`));
        }
        right.append(saveRow);
      }
      columns.append(right);
      root.append(columns);
    }
  }

  render();
  return {
    state,
    render,
    actions: { handleCsv, selectFile, changeMode, runRevision, saveRevision },
  };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  createApp(document.getElementById("app")!, new ApiClient());
}
