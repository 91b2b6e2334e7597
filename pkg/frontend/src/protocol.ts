// Mirror of the arena wire protocol (docs/protocol.md in the engine
// repo): newline-delimited JSON, one object per line, same shapes over
// raw TCP and the /ws WebSocket bridge.

export type SeatCard = [number, string];

export interface HelloMsg {
  kind: 'hello';
  server: string;
  protocol: number;
}

export interface SeatMsg {
  kind: 'seat';
  seat: number;
  players: string[];
}

export interface DealMsg {
  kind: 'deal';
  game: string;
  hand: string[];
  leader: number;
}

export interface YourTurnMsg {
  kind: 'your_turn';
  legal: string[];
  trick: SeatCard[];
  deadline: number;
  hint?: Record<string, number>;
}

export interface PlayMsg {
  kind: 'play';
  seat: number;
  card: string;
  legal: boolean;
}

export interface TrickResultMsg {
  kind: 'trick_result';
  winner: number;
  trick: SeatCard[];
  captured: string[];
}

export interface GameResultMsg {
  kind: 'game_result';
  game: string;
  scores: number[];
  teams: number[];
}

export interface StateSyncMsg {
  kind: 'state_sync';
  game: string;
  seat: number;
  hand: string[];
  history: SeatCard[];
  trick: SeatCard[];
  piles: string[][];
  to_play: number;
}

export interface ErrorMsg {
  kind: 'error';
  reason: string;
  legal?: string[];
}

export type ServerMessage =
  | HelloMsg
  | SeatMsg
  | DealMsg
  | YourTurnMsg
  | PlayMsg
  | TrickResultMsg
  | GameResultMsg
  | StateSyncMsg
  | ErrorMsg;

const CARD_TOKEN = /^[SHDC][23456789TJQKA]$/;

export function isCardToken(value: unknown): value is string {
  return typeof value === 'string' && CARD_TOKEN.test(value);
}

function isSeat(value: unknown): value is number {
  return typeof value === 'number' && Number.isInteger(value) && value >= 0 && value <= 3;
}

function isCardList(value: unknown): value is string[] {
  return Array.isArray(value) && value.every(isCardToken);
}

function isSeatCardList(value: unknown): value is SeatCard[] {
  return (
    Array.isArray(value) &&
    value.every((e) => Array.isArray(e) && e.length === 2 && isSeat(e[0]) && isCardToken(e[1]))
  );
}

function isNumberList(value: unknown, length: number): value is number[] {
  return Array.isArray(value) && value.length === length && value.every((n) => typeof n === 'number');
}

function isHint(value: unknown): boolean {
  if (value === undefined) return true;
  if (typeof value !== 'object' || value === null || Array.isArray(value)) return false;
  return Object.entries(value).every(([k, v]) => isCardToken(k) && typeof v === 'number');
}

// Parse one line from the server. Anything that does not match the
// documented shape comes back null; the caller shows a banner and the
// session keeps going, per the "malformed message must not crash the
// table" rule.
export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: any;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== 'object' || msg === null || Array.isArray(msg)) return null;

  switch (msg.kind) {
    case 'hello':
      return typeof msg.server === 'string' && msg.protocol === 1 ? msg : null;
    case 'seat':
      return isSeat(msg.seat) &&
        Array.isArray(msg.players) &&
        msg.players.length === 4 &&
        msg.players.every((p: unknown) => typeof p === 'string')
        ? msg
        : null;
    case 'deal':
      return typeof msg.game === 'string' && isCardList(msg.hand) && msg.hand.length === 13 && isSeat(msg.leader)
        ? msg
        : null;
    case 'your_turn':
      return isCardList(msg.legal) &&
        msg.legal.length > 0 &&
        isSeatCardList(msg.trick) &&
        typeof msg.deadline === 'number' &&
        isHint(msg.hint)
        ? msg
        : null;
    case 'play':
      return isSeat(msg.seat) && isCardToken(msg.card) ? msg : null;
    case 'trick_result':
      return isSeat(msg.winner) && isSeatCardList(msg.trick) && msg.trick.length === 4 && isCardList(msg.captured)
        ? msg
        : null;
    case 'game_result':
      return typeof msg.game === 'string' && isNumberList(msg.scores, 4) && isNumberList(msg.teams, 2) ? msg : null;
    case 'state_sync':
      return typeof msg.game === 'string' &&
        isSeat(msg.seat) &&
        isCardList(msg.hand) &&
        isSeatCardList(msg.history) &&
        isSeatCardList(msg.trick) &&
        Array.isArray(msg.piles) &&
        msg.piles.length === 4 &&
        msg.piles.every(isCardList) &&
        isSeat(msg.to_play)
        ? msg
        : null;
    case 'error':
      return typeof msg.reason === 'string' && (msg.legal === undefined || isCardList(msg.legal)) ? msg : null;
    default:
      return null;
  }
}

export function helloLine(name: string): string {
  return JSON.stringify({ kind: 'hello', name, protocol: 1 });
}

export function seatLine(seat?: number): string {
  return seat === undefined ? JSON.stringify({ kind: 'seat' }) : JSON.stringify({ kind: 'seat', seat });
}

export function playLine(card: string): string {
  return JSON.stringify({ kind: 'play', card });
}
