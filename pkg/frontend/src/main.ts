import { attachKeyboard, renderTable, showBanner } from './dom.js';
import { buildInspectorModel, parseDumpLines, renderInspector, BeliefDump } from './inspector.js';
import { GameSession, webSocketTransport } from './session.js';

// Entry point for the browser bundle. Query parameters:
//   ?name=ada     display name (default "player")
//   ?seat=2       preferred chair, first free one otherwise
//   ?hints=1      overlay the server's hint values on the hand

const params = new URLSearchParams(location.search);
const name = params.get('name') ?? 'player';
const seatParam = params.get('seat');
const options = { showHints: params.get('hints') === '1' };

const tableEl = document.getElementById('table')!;
const bannerEl = document.getElementById('banner')!;
const statusEl = document.getElementById('status')!;
const inspectorEl = document.getElementById('inspector')!;
const hintToggle = document.getElementById('hint-toggle') as HTMLInputElement;
const dumpInput = document.getElementById('dump-file') as HTMLInputElement;
const dumpPicker = document.getElementById('dump-decision') as HTMLSelectElement;

const scheme = location.protocol === 'https:' ? 'wss' : 'ws';
const session = new GameSession(
  webSocketTransport(`${scheme}://${location.host}/ws`),
  {
    name,
    seat: seatParam === null ? undefined : Number(seatParam),
  },
  {
    onView: (view) => renderTable(tableEl, view, session, options),
    onBanner: (text) => showBanner(bannerEl, text),
    onStatus: (status) => {
      statusEl.textContent = status;
      statusEl.dataset.status = status;
    },
  },
);

hintToggle.checked = options.showHints;
hintToggle.addEventListener('change', () => {
  options.showHints = hintToggle.checked;
  renderTable(tableEl, session.view, session, options);
});

// Diagnostics dumps are JSON-lines files written by the engine's
// belief agent; pick a file, then step through its decisions.
let dumps: BeliefDump[] = [];

function showDecision(index: number): void {
  renderInspector(inspectorEl, buildInspectorModel(dumps[index] ?? null));
}

dumpInput.addEventListener('change', async () => {
  const file = dumpInput.files?.[0];
  if (!file) return;
  dumps = parseDumpLines(await file.text());
  dumpPicker.replaceChildren(
    ...dumps.map((dump, i) => {
      const option = document.createElement('option');
      option.value = String(i);
      option.textContent = `decision ${i + 1} (seat ${dump.player}, ${dump.legal.length} choices)`;
      return option;
    }),
  );
  dumpPicker.hidden = dumps.length === 0;
  if (dumps.length === 0) showBanner(bannerEl, 'no decisions found in that file');
  showDecision(0);
});

dumpPicker.addEventListener('change', () => showDecision(Number(dumpPicker.value)));

renderInspector(inspectorEl, null);
attachKeyboard(session);
session.connect();
