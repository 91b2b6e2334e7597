import { helloLine, parseServerMessage, playLine, seatLine } from './protocol.js';
import { initialView, reduce, TableView } from './table.js';

// One live connection to the arena, plus the reconnect dance. The
// session owns the protocol state machine; rendering code only ever
// sees TableView snapshots and banner strings.

export interface Transport {
  send(line: string): void;
  close(): void;
}

export interface TransportHandlers {
  onOpen(): void;
  onLine(line: string): void;
  onClose(): void;
}

export type TransportFactory = (handlers: TransportHandlers) => Transport;

export type SessionStatus = 'connecting' | 'online' | 'reconnecting' | 'closed';

export interface SessionOptions {
  name: string;
  seat?: number;
  baseRetryMs?: number;
  maxRetries?: number;
}

export interface SessionEvents {
  onView(view: TableView): void;
  onBanner(text: string): void;
  onStatus(status: SessionStatus): void;
  onHint?(hint: Record<string, number> | null): void;
}

export function webSocketTransport(url: string): TransportFactory {
  return (handlers) => {
    const ws = new WebSocket(url);
    ws.onopen = () => handlers.onOpen();
    ws.onmessage = (event) => handlers.onLine(String(event.data));
    ws.onclose = () => handlers.onClose();
    ws.onerror = () => {};
    return {
      send: (line) => ws.send(line),
      close: () => ws.close(),
    };
  };
}

export class GameSession {
  view: TableView = initialView();
  pendingCard: string | null = null;

  private transport: Transport | null = null;
  private stage: 'hello' | 'seat' | 'table' = 'hello';
  private wantedSeat: number | undefined;
  private retries = 0;
  private closedByUser = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private factory: TransportFactory,
    private options: SessionOptions,
    private events: SessionEvents,
  ) {
    this.wantedSeat = options.seat;
  }

  connect(): void {
    this.stage = 'hello';
    this.events.onStatus(this.retries === 0 ? 'connecting' : 'reconnecting');
    this.transport = this.factory({
      onOpen: () => {
        this.transport?.send(helloLine(this.options.name));
      },
      onLine: (line) => this.handleLine(line),
      onClose: () => this.handleClose(),
    });
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer) clearTimeout(this.retryTimer);
    this.transport?.close();
    this.events.onStatus('closed');
  }

  // Client-side gate: a card goes out only while the server is waiting
  // on us and only if it is on the legal list it sent.
  playCard(card: string): boolean {
    if (this.stage !== 'table') return false;
    if (this.view.seat === null || this.view.toPlay !== this.view.seat) return false;
    if (!this.view.legal.includes(card)) return false;
    if (this.pendingCard !== null) return false;
    this.pendingCard = card;
    this.transport?.send(playLine(card));
    this.events.onView(this.view);
    return true;
  }

  requestSeat(seat?: number): void {
    this.wantedSeat = seat;
    if (this.stage === 'table' && this.view.seat === null) {
      this.stage = 'seat';
      this.transport?.send(seatLine(seat));
    }
  }

  private handleLine(line: string): void {
    const msg = parseServerMessage(line);
    if (msg === null) {
      console.warn('unreadable server message', line);
      this.events.onBanner('the server sent something unreadable; ignoring it');
      return;
    }

    if (msg.kind === 'hello') {
      this.retries = 0;
      this.stage = 'seat';
      this.events.onStatus('online');
      this.transport?.send(seatLine(this.wantedSeat));
      return;
    }

    if (msg.kind === 'error') {
      this.pendingCard = null;
      if (this.stage === 'seat') {
        this.stage = 'table'; // stay connected, let the user pick again
        this.events.onBanner(`seat refused: ${msg.reason}`);
      } else {
        this.events.onBanner(msg.reason);
      }
      this.view = reduce(this.view, msg);
      this.events.onView(this.view);
      return;
    }

    if (msg.kind === 'seat') {
      this.stage = 'table';
      this.wantedSeat = msg.seat; // reclaim the same chair after a drop
    }
    if (msg.kind === 'play' && msg.seat === this.view.seat) {
      this.pendingCard = null;
    }
    this.view = reduce(this.view, msg);
    if (msg.kind === 'your_turn' && this.events.onHint) {
      this.events.onHint(this.view.hint);
    }
    this.events.onView(this.view);
  }

  private handleClose(): void {
    this.transport = null;
    this.pendingCard = null;
    if (this.closedByUser) return;
    const max = this.options.maxRetries ?? 8;
    if (this.retries >= max) {
      this.events.onBanner('lost the server and could not get it back');
      this.events.onStatus('closed');
      return;
    }
    const wait = (this.options.baseRetryMs ?? 500) * 2 ** this.retries;
    this.retries += 1;
    this.events.onStatus('reconnecting');
    this.retryTimer = setTimeout(() => this.connect(), wait);
  }
}
