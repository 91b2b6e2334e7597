import { displayOrder, isRed, pointValue, pretty } from './cards.js';
import type { GameSession } from './session.js';
import type { TableView } from './table.js';

// Straight DOM rendering, no framework. The whole table is rebuilt on
// every view change; at 52 cards a game that is nowhere near a
// bottleneck and it keeps rendering a pure function of TableView.

const REL_NAMES = ['south', 'west', 'north', 'east'];

function relative(seat: number, ourSeat: number | null): number {
  return ourSeat === null ? seat : (seat - ourSeat + 4) % 4;
}

export interface RenderOptions {
  showHints: boolean;
}

export function renderTable(
  root: HTMLElement,
  view: TableView,
  session: GameSession,
  options: RenderOptions,
): void {
  root.replaceChildren(
    buildSeats(view),
    buildTrick(view),
    buildPiles(view),
    buildHand(view, session, options),
    buildScores(view),
  );
}

function buildSeats(view: TableView): HTMLElement {
  const strip = document.createElement('div');
  strip.className = 'seat-strip';
  view.players.forEach((name, seat) => {
    const tag = document.createElement('span');
    tag.className = 'seat-tag';
    if (seat === view.seat) tag.classList.add('me');
    if (seat === view.toPlay) tag.classList.add('to-play');
    tag.textContent = `${seat}: ${name}${seat === view.seat ? ' (you)' : ''}`;
    strip.append(tag);
  });
  if (view.players.length === 0) {
    strip.textContent = 'not seated yet';
  }
  return strip;
}

function buildTrick(view: TableView): HTMLElement {
  const area = document.createElement('div');
  area.className = 'trick-area';
  const plays = view.trick.length > 0 ? view.trick : view.lastTrick?.trick ?? [];
  const faded = view.trick.length === 0 && plays.length > 0;
  for (const play of plays) {
    const slot = document.createElement('div');
    const rel = relative(play.seat, view.seat);
    slot.className = `trick-card pos-${REL_NAMES[rel]}`;
    if (faded) slot.classList.add('faded');
    slot.append(cardFace(play.card));
    area.append(slot);
  }
  if (view.lastTrick && faded) {
    const note = document.createElement('div');
    note.className = 'trick-note';
    note.textContent = `trick to seat ${view.lastTrick.winner}` +
      (view.lastTrick.captured.length ? `, took ${view.lastTrick.captured.join(' ')}` : '');
    area.append(note);
  }
  return area;
}

function cardFace(token: string): HTMLElement {
  const span = document.createElement('span');
  span.className = isRed(token) ? 'card red' : 'card';
  span.textContent = pretty(token);
  return span;
}

function buildPiles(view: TableView): HTMLElement {
  const box = document.createElement('div');
  box.className = 'piles';
  view.piles.forEach((pile, seat) => {
    if (pile.length === 0) return;
    const row = document.createElement('div');
    row.className = 'pile-row';
    const who = document.createElement('span');
    who.textContent = `seat ${seat} holds `;
    row.append(who);
    for (const token of pile) {
      const face = cardFace(token);
      const value = pointValue(token);
      face.title = value === 0 ? 'doubles at settlement' : `${value}`;
      row.append(face);
    }
    box.append(row);
  });
  return box;
}

function buildHand(view: TableView, session: GameSession, options: RenderOptions): HTMLElement {
  const row = document.createElement('div');
  row.className = 'hand';
  const myTurn = view.seat !== null && view.toPlay === view.seat && view.legal.length > 0;
  for (const token of displayOrder(view.hand)) {
    const button = document.createElement('button');
    button.className = isRed(token) ? 'hand-card red' : 'hand-card';
    button.dataset.card = token;
    button.textContent = pretty(token);
    const playable = myTurn && view.legal.includes(token) && session.pendingCard === null;
    button.disabled = !playable;
    if (session.pendingCard === token) button.classList.add('pending');
    if (options.showHints && view.hint && view.hint[token] !== undefined) {
      const hint = document.createElement('small');
      hint.className = 'hint-value';
      hint.textContent = view.hint[token].toFixed(0);
      button.append(hint);
    }
    button.addEventListener('click', () => session.playCard(token));
    row.append(button);
  }
  return row;
}

function buildScores(view: TableView): HTMLElement {
  const box = document.createElement('div');
  box.className = 'scores';
  const totals = document.createElement('p');
  totals.textContent =
    `totals after ${view.gamesFinished} game${view.gamesFinished === 1 ? '' : 's'}: ` +
    `seats 0+2 ${view.teamTotals[0]}, seats 1+3 ${view.teamTotals[1]}`;
  box.append(totals);
  if (view.scores) {
    const last = document.createElement('p');
    last.textContent = `last game by seat: ${view.scores.join(', ')}`;
    box.append(last);
  }
  return box;
}

// Cards are reachable from the keyboard: press the suit letter, then
// the rank character. Escape abandons a half-typed card.
export function attachKeyboard(session: GameSession): () => void {
  let suit: string | null = null;
  const listener = (event: KeyboardEvent) => {
    if (event.target instanceof HTMLInputElement) return;
    const key = event.key.toUpperCase();
    if (key === 'ESCAPE') {
      suit = null;
      return;
    }
    if ('SHDC'.includes(key) && key.length === 1) {
      suit = key;
      return;
    }
    if (suit && '23456789TJQKA'.includes(key)) {
      session.playCard(`${suit}${key}`);
      suit = null;
    }
  };
  document.addEventListener('keydown', listener);
  return () => document.removeEventListener('keydown', listener);
}

export function showBanner(el: HTMLElement, text: string): void {
  el.textContent = text;
  el.classList.add('visible');
  setTimeout(() => el.classList.remove('visible'), 4000);
}
