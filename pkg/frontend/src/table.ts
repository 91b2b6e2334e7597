import type { ServerMessage, SeatCard } from './protocol.js';

// Everything the table renders, folded from server messages alone.
// No field here is ever guessed: hands come from deal/state_sync,
// card removals from play broadcasts, piles from trick_result.

export interface TrickPlay {
  seat: number;
  card: string;
}

export interface LastTrick {
  winner: number;
  trick: TrickPlay[];
  captured: string[];
}

export interface TableView {
  phase: 'lobby' | 'playing' | 'between';
  seat: number | null;
  players: string[];
  game: string | null;
  hand: string[];
  trick: TrickPlay[];
  piles: string[][];
  lastTrick: LastTrick | null;
  toPlay: number | null;
  legal: string[];
  deadline: number | null;
  hint: Record<string, number> | null;
  scores: number[] | null;
  teamTotals: [number, number];
  gamesFinished: number;
}

export function initialView(): TableView {
  return {
    phase: 'lobby',
    seat: null,
    players: [],
    game: null,
    hand: [],
    trick: [],
    piles: [[], [], [], []],
    lastTrick: null,
    toPlay: null,
    legal: [],
    deadline: null,
    hint: null,
    scores: null,
    teamTotals: [0, 0],
    gamesFinished: 0,
  };
}

function plays(pairs: SeatCard[]): TrickPlay[] {
  return pairs.map(([seat, card]) => ({ seat, card }));
}

export function reduce(view: TableView, msg: ServerMessage): TableView {
  switch (msg.kind) {
    case 'hello':
      return view;

    case 'seat':
      return { ...view, seat: msg.seat, players: msg.players };

    case 'deal':
      return {
        ...view,
        phase: 'playing',
        game: msg.game,
        hand: [...msg.hand],
        trick: [],
        piles: [[], [], [], []],
        lastTrick: null,
        toPlay: msg.leader,
        legal: [],
        deadline: null,
        hint: null,
        scores: null,
      };

    case 'your_turn':
      return {
        ...view,
        toPlay: view.seat,
        trick: plays(msg.trick),
        legal: [...msg.legal],
        deadline: msg.deadline,
        hint: msg.hint ? { ...msg.hint } : null,
      };

    case 'play': {
      const trick = view.trick.length === 4 ? [] : [...view.trick];
      trick.push({ seat: msg.seat, card: msg.card });
      const ours = msg.seat === view.seat;
      return {
        ...view,
        hand: ours ? view.hand.filter((c) => c !== msg.card) : view.hand,
        trick,
        toPlay: trick.length === 4 ? null : (msg.seat + 1) % 4,
        legal: ours ? [] : view.legal,
        deadline: ours ? null : view.deadline,
        hint: ours ? null : view.hint,
      };
    }

    case 'trick_result': {
      const piles = view.piles.map((pile, seat) =>
        seat === msg.winner ? [...pile, ...msg.captured] : pile,
      );
      return {
        ...view,
        piles,
        trick: [],
        lastTrick: { winner: msg.winner, trick: plays(msg.trick), captured: [...msg.captured] },
        toPlay: msg.winner,
      };
    }

    case 'game_result':
      return {
        ...view,
        phase: 'between',
        scores: [...msg.scores],
        teamTotals: [view.teamTotals[0] + msg.teams[0], view.teamTotals[1] + msg.teams[1]],
        gamesFinished: view.gamesFinished + 1,
        toPlay: null,
        legal: [],
        deadline: null,
        hint: null,
      };

    case 'state_sync':
      return {
        ...view,
        phase: 'playing',
        seat: msg.seat,
        game: msg.game,
        hand: [...msg.hand],
        trick: plays(msg.trick),
        piles: msg.piles.map((pile) => [...pile]),
        lastTrick: null,
        toPlay: msg.to_play,
        legal: [],
        deadline: null,
        hint: null,
        scores: null,
      };

    case 'error':
      // rejected input never changed the view (cards leave the hand on
      // the play broadcast, not on click), so there is nothing to roll
      // back; a fresher legal list is still worth keeping
      return msg.legal && view.phase === 'playing' ? { ...view, legal: [...msg.legal] } : view;
  }
}
