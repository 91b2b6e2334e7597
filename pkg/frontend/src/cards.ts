// Card tokens are suit letter + rank character, e.g. "SQ", "HT", "C2".

export const SUITS = ['S', 'H', 'D', 'C'] as const;
export const RANKS = ['2', '3', '4', '5', '6', '7', '8', '9', 'T', 'J', 'Q', 'K', 'A'] as const;

const GLYPHS: Record<string, string> = { S: '♠', H: '♥', D: '♦', C: '♣' };

export function suitOf(token: string): string {
  return token[0];
}

export function rankOf(token: string): string {
  return token[1];
}

export function isRed(token: string): boolean {
  return token[0] === 'H' || token[0] === 'D';
}

export function pretty(token: string): string {
  const rank = token[1] === 'T' ? '10' : token[1];
  return `${GLYPHS[token[0]]}${rank}`;
}

// Same total order the server uses when it sorts a hand: suits in
// S, H, D, C order, ranks ascending inside a suit.
export function cardIndex(token: string): number {
  return SUITS.indexOf(token[0] as any) * 13 + RANKS.indexOf(token[1] as any);
}

// Hand display order: suit groups as above, but high cards first
// within a suit, the way people fan a hand.
export function displayOrder(hand: string[]): string[] {
  return [...hand].sort((a, b) => {
    const suitGap = SUITS.indexOf(a[0] as any) - SUITS.indexOf(b[0] as any);
    return suitGap !== 0 ? suitGap : cardIndex(b) - cardIndex(a);
  });
}

// Face value of a captured point card, before the end-of-game
// settlement (all-hearts flip, ten-of-clubs doubling).
export function pointValue(token: string): number {
  if (token === 'SQ') return -100;
  if (token === 'DJ') return 100;
  if (token[0] !== 'H') return 0;
  const ladder: Record<string, number> = {
    A: -50, K: -40, Q: -30, J: -20, T: -10,
    '9': -10, '8': -10, '7': -10, '6': -10, '5': -10,
  };
  return ladder[token[1]] ?? 0;
}
