// Belief inspector: renders one decision record from the engine's
// diagnostics dump (JSON lines, one object per decision) as a Q bar
// chart plus a table of sampled scenarios and their weights.

export interface DumpScenario {
  stratum: Record<string, number> | null;
  hands: string[][];
  score: number;
  weight: number;
  values: Record<string, number>;
}

export interface BeliefDump {
  player: number;
  legal: string[];
  q: Record<string, number>;
  scenarios: DumpScenario[];
}

export interface QBar {
  card: string;
  q: number;
  fill: number; // 0..1, best action = 1
  best: boolean;
}

export interface ScenarioRow {
  label: string;
  score: number;
  weight: number;
}

export interface InspectorModel {
  player: number;
  bars: QBar[];
  rows: ScenarioRow[];
  weightSum: number;
}

export function parseDumpLines(text: string): BeliefDump[] {
  const dumps: BeliefDump[] = [];
  for (const line of text.split('\n')) {
    if (!line.trim()) continue;
    try {
      const obj = JSON.parse(line);
      if (obj && Array.isArray(obj.legal) && obj.q && Array.isArray(obj.scenarios)) {
        dumps.push(obj);
      }
    } catch {
      // a torn line in a dump file is not worth an error banner
    }
  }
  return dumps;
}

function stratumLabel(stratum: Record<string, number> | null): string {
  if (stratum === null) return 'unstratified';
  const parts = Object.entries(stratum).map(([card, seat]) => `${card} at seat ${seat}`);
  return parts.length ? parts.join(', ') : 'all key cards visible';
}

export function buildInspectorModel(dump: BeliefDump | null): InspectorModel | null {
  if (dump === null) return null;
  const qs = dump.legal.map((card) => dump.q[card] ?? 0);
  const top = Math.max(...qs);
  const bottom = Math.min(...qs);
  const span = top - bottom || 1;
  const bestCard = dump.legal[qs.indexOf(top)];
  const bars = dump.legal
    .map((card) => ({
      card,
      q: dump.q[card] ?? 0,
      fill: ((dump.q[card] ?? 0) - bottom) / span,
      best: card === bestCard,
    }))
    .sort((a, b) => b.q - a.q);
  const rows = dump.scenarios.map((s) => ({
    label: stratumLabel(s.stratum),
    score: s.score,
    weight: s.weight,
  }));
  const weightSum = rows.reduce((acc, row) => acc + row.weight, 0);
  return { player: dump.player, bars, rows, weightSum };
}

export function renderInspector(root: HTMLElement, model: InspectorModel | null): void {
  if (model === null) {
    root.hidden = true;
    root.replaceChildren();
    return;
  }
  root.hidden = false;

  const title = document.createElement('h3');
  title.textContent = `belief inspector, seat ${model.player}`;

  const chart = document.createElement('div');
  chart.className = 'q-bars';
  for (const bar of model.bars) {
    const row = document.createElement('div');
    row.className = bar.best ? 'q-bar best' : 'q-bar';
    const label = document.createElement('span');
    label.className = 'q-card';
    label.textContent = bar.card;
    const track = document.createElement('span');
    track.className = 'q-track';
    const fill = document.createElement('span');
    fill.className = 'q-fill';
    fill.style.width = `${Math.round(bar.fill * 100)}%`;
    track.append(fill);
    const value = document.createElement('span');
    value.className = 'q-value';
    value.textContent = bar.q.toFixed(1);
    row.append(label, track, value);
    chart.append(row);
  }

  const table = document.createElement('table');
  table.className = 'scenario-table';
  const head = table.insertRow();
  for (const text of ['scenario', 'plausibility', 'weight']) {
    const cell = document.createElement('th');
    cell.textContent = text;
    head.append(cell);
  }
  for (const row of model.rows) {
    const tr = table.insertRow();
    tr.insertCell().textContent = row.label;
    tr.insertCell().textContent = row.score.toFixed(3);
    tr.insertCell().textContent = row.weight.toFixed(3);
  }

  const footer = document.createElement('p');
  footer.className = 'weight-sum';
  footer.textContent = `${model.rows.length} scenarios, weights sum to ${model.weightSum.toFixed(6)}`;

  root.replaceChildren(title, chart, table, footer);
}
