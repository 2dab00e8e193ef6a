// DOM wiring for the analyst console. All state changes go through the
// gateway; the only local state is the current claim and picker contents.

import { GatewayClient, GatewayError } from "./api";
import { formatAge, taskAgeSeconds, traceSummary } from "./format";
import { AnalystSession } from "./session";
import { Catalog, Disposition, Task } from "./types";
import { Typeahead } from "./typeahead";

const POOLS = ["source-language", "target-language"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showBanner(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearBanner(): void {
  el<HTMLDivElement>("error-banner").hidden = true;
}

function bindPicker(field: string, picker: Typeahead, onChange: () => void): void {
  const input = el<HTMLInputElement>(`pick-${field}`);
  const list = el<HTMLUListElement>(`suggest-${field}`);
  picker.setOptions([]);
  input.addEventListener("input", () => {
    picker.input(input.value);
    onChange();
  });
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "ArrowDown") {
      picker.moveHighlight(1);
      renderSuggestions(list, picker);
      ev.preventDefault();
    } else if (ev.key === "ArrowUp") {
      picker.moveHighlight(-1);
      renderSuggestions(list, picker);
      ev.preventDefault();
    } else if (ev.key === "Enter") {
      if (picker.commitHighlighted()) {
        input.value = picker.value ?? "";
        onChange();
      }
      ev.preventDefault();
    }
  });
}

function renderSuggestions(list: HTMLUListElement, picker: Typeahead): void {
  const items = list.querySelectorAll("li");
  items.forEach((item, i) => {
    item.classList.toggle("highlighted", item.textContent === picker.highlightedValue && i >= 0);
  });
}

export function startConsole(): void {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("gateway") ?? "http://127.0.0.1:8000";
  const analystId = params.get("analyst") ?? "console-analyst";
  const pool = params.get("pool") ?? POOLS[0];

  const client = new GatewayClient(baseUrl);
  const session = new AnalystSession(client, analystId, pool);
  let catalog: Catalog = { tn: [], sv: [], en: [], joint: [] };

  const pickers: Record<string, Typeahead> = {};
  for (const field of ["tn", "sv", "en"]) {
    const list = el<HTMLUListElement>(`suggest-${field}`);
    const input = el<HTMLInputElement>(`pick-${field}`);
    const picker = new Typeahead({
      onSuggestions(items) {
        list.replaceChildren(
          ...items.map((text) => {
            const li = document.createElement("li");
            li.textContent = text;
            li.addEventListener("mousedown", () => {
              input.value = text;
              picker.input(text);
              updateSubmitState();
            });
            return li;
          }),
        );
      },
      onCommit() {
        updateSubmitState();
      },
    });
    pickers[field] = picker;
    bindPicker(field, picker, updateSubmitState);
  }

  function updateSubmitState(): void {
    const check = session.checkSubmit(
      catalog,
      pickers.tn.value,
      pickers.sv.value,
      pickers.en.value,
    );
    const button = el<HTMLButtonElement>("submit");
    button.disabled = session.currentTask === null || !check.ok;
    el<HTMLSpanElement>("submit-hint").textContent = check.ok
      ? ""
      : `missing: ${check.missing.join(", ")}`;
  }

  function renderTask(task: Task | null): void {
    const payload = el<HTMLPreElement>("payload");
    const trace = el<HTMLDivElement>("trace");
    const age = el<HTMLSpanElement>("task-age");
    if (task === null) {
      payload.textContent = "(no tasks queued)";
      trace.textContent = "";
      age.textContent = "";
      el<HTMLButtonElement>("claim").disabled = false;
    } else {
      // textContent keeps the payload byte-for-byte; never innerHTML here.
      payload.textContent = task.payload;
      trace.textContent = traceSummary(task.trace);
      age.textContent = formatAge(taskAgeSeconds(task, Date.now() / 1000));
      el<HTMLButtonElement>("claim").disabled = true;
    }
    updateSubmitState();
  }

  function renderDisposition(disp: Disposition): void {
    const label = disp.label ? `${disp.label.tn} / ${disp.label.sv} / ${disp.label.en}` : "-";
    el<HTMLDivElement>("last-result").textContent =
      `${disp.utterance_id}: ${disp.outcome} (${label})`;
  }

  async function refreshQueues(): Promise<void> {
    try {
      const stats = await client.poolStats();
      clearBanner();
      for (const name of POOLS) {
        const st = stats[name] ?? { depth: 0, oldest_age_s: null };
        const cell = el<HTMLSpanElement>(`depth-${name}`);
        cell.textContent =
          st.depth === 0
            ? "no tasks"
            : `${st.depth} queued, oldest ${formatAge(st.oldest_age_s ?? 0)}`;
      }
    } catch (err) {
      showBanner(`gateway unreachable: ${String(err)}`);
    }
  }

  async function claim(): Promise<void> {
    try {
      const task = await session.claimNext();
      clearBanner();
      renderTask(task);
    } catch (err) {
      showBanner(String(err));
    }
  }

  el<HTMLButtonElement>("claim").addEventListener("click", () => void claim());

  el<HTMLButtonElement>("submit").addEventListener("click", () => {
    const [tn, sv, en] = [pickers.tn.value, pickers.sv.value, pickers.en.value];
    if (!tn || !sv || !en) return;
    session
      .submitLabel(tn, sv, en)
      .then((disp) => {
        clearBanner();
        renderDisposition(disp);
        for (const picker of Object.values(pickers)) picker.clear();
        for (const field of ["tn", "sv", "en"]) el<HTMLInputElement>(`pick-${field}`).value = "";
        renderTask(null);
        void refreshQueues();
        return claim(); // keep the analyst moving: claim the next task
      })
      .catch((err) => {
        // Selections stay as typed; the analyst can correct and retry.
        if (err instanceof GatewayError) showBanner(`submit rejected: ${err.detail}`);
        else showBanner(`submit failed: ${String(err)}`);
      });
  });

  client
    .catalog()
    .then((cat) => {
      catalog = cat;
      pickers.tn.setOptions(cat.tn);
      pickers.sv.setOptions(cat.sv);
      pickers.en.setOptions(cat.en);
      el<HTMLSpanElement>("catalog-size").textContent =
        `${cat.tn.length} tn / ${cat.sv.length} sv / ${cat.en.length} en`;
    })
    .catch((err) => showBanner(`could not load catalog: ${String(err)}`));

  void refreshQueues();
  window.setInterval(() => void refreshQueues(), 5000);
  renderTask(null);
}

if (typeof document !== "undefined" && document.getElementById("claim")) {
  startConsole();
}
