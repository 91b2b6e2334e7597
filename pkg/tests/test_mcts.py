import math
import random

import numpy as np
import pytest

from gongzhu.cards import parse_card
from gongzhu.engine import TerminalStateError, deal, legal_moves, play
from gongzhu.mcts import (
    FastState,
    MctsAgent,
    SearchConfig,
    SearchNode,
    encode_fast,
    net_evaluator,
    sample_from_visits,
    search,
    search_tree,
    select_child,
    zero_evaluator,
)
from gongzhu.nn import NetConfig, PolicyValueNet, encode_exact


def cards(*tokens):
    return [parse_card(t) for t in tokens]


def endgame(seed, plays=44):
    """Random perfect-information tail position, trick boundary."""
    state = deal(seed)
    rng = random.Random(seed * 31 + 1)
    for _ in range(plays):
        state = play(state, rng.choice(sorted(legal_moves(state))))
    return state


def minimax(fs: FastState) -> float:
    """Exhaustive game value, team 0 maximizing the differential."""
    if fs.finished:
        return float(fs.team_differential())
    values = [minimax(fs.child(c)) for c in fs.legal_cards()]
    return max(values) if fs.to_play % 2 == 0 else min(values)


def subtree_outcomes(fs: FastState, acc):
    if fs.finished:
        acc.append(fs.team_differential())
        return acc
    for c in fs.legal_cards():
        subtree_outcomes(fs.child(c), acc)
    return acc


# ---------------------------------------------------------------------------
# FastState mirrors the engine move for move.


def test_fast_state_lockstep_with_engine():
    rng = random.Random(3)
    for seed in range(25):
        state = deal(seed)
        fs = FastState.from_state(state)
        while not state.finished:
            assert sorted(legal_moves(state)) == fs.legal_cards()
            card = rng.choice(fs.legal_cards())
            state = play(state, card)
            fs.play(card)
            assert fs.to_play == state.to_play
        assert fs.finished
        s = state.scores()
        assert fs.team_differential() == s.per_team[0] - s.per_team[1]


def test_fast_state_mid_game_conversion():
    state = endgame(4, plays=30)
    fs = FastState.from_state(state)
    assert fs.legal_cards() == sorted(legal_moves(state))
    assert len(fs.trick) == len(state.current_trick)


def test_encode_fast_equals_encode_exact():
    rng = random.Random(8)
    state = deal(12)
    fs = FastState.from_state(state)
    for _ in range(52):
        for mover in range(4):
            assert np.array_equal(encode_fast(fs, mover),
                                  encode_exact(state, mover))
        if state.finished:
            break
        card = rng.choice(sorted(legal_moves(state)))
        state = play(state, card)
        fs.play(card)


# ---------------------------------------------------------------------------
# Child selection


def node_with_children(stats, to_play=0):
    parent = SearchNode(FastState([0] * 4, [0] * 4, [], to_play, to_play, 4))
    for i, (v, n) in enumerate(stats):
        child = SearchNode(FastState([0] * 4, [0] * 4, [], 0, 0, 3))
        child.value = v
        child.visits = n
        parent.children[i] = child
    parent.visits = sum(n for _, n in stats)
    return parent


def test_select_child_worked_example():
    # By hand: 5 + 30*sqrt(ln 10 / 2) = 37.19 and 0 + 30*sqrt(ln 10 / 1)
    # = 45.52, so exploration wins despite the worse mean.
    parent = node_with_children([(5.0, 2), (0.0, 1)])
    parent.visits = 10
    s1 = 5 + 30 * math.sqrt(math.log(10) / 2)
    s2 = 0 + 30 * math.sqrt(math.log(10) / 1)
    assert s1 == pytest.approx(37.19, abs=0.01)
    assert s2 == pytest.approx(45.52, abs=0.01)
    assert select_child(parent, c=30.0) == 1


def test_select_child_exploitation_limit():
    parent = node_with_children([(5.0, 2), (8.0, 1), (-2.0, 5)])
    assert select_child(parent, c=0.0) == 1


def test_select_child_minimizing_seat_flips_sign():
    parent = node_with_children([(5.0, 2), (-5.0, 2)], to_play=1)
    assert select_child(parent, c=0.0) == 1


def test_select_child_prefers_least_visited_on_equal_value():
    parent = node_with_children([(3.0, 9), (3.0, 2), (3.0, 5)])
    assert select_child(parent, c=30.0) == 1


def test_select_child_unvisited_first_and_leaf_error():
    parent = node_with_children([(50.0, 3), (0.0, 0)])
    assert select_child(parent, c=30.0) == 1
    empty = SearchNode(FastState([0] * 4, [0] * 4, [], 0, 0, 0))
    with pytest.raises(TerminalStateError):
        select_child(empty, c=30.0)


# ---------------------------------------------------------------------------
# Search behaviour


def test_search_single_legal_is_point_mass():
    state = endgame(7, plays=48)
    probs, _ = search(state, zero_evaluator, SearchConfig.training())
    legal = sorted(legal_moves(state))
    assert len(legal) == 1
    assert probs[legal[0]] == 1.0


def test_search_visit_counts_sum_to_budget():
    state = endgame(9, plays=40)
    cfg = SearchConfig.training()
    root = search_tree(state, zero_evaluator, cfg)
    total = cfg.count_for(len(root.children))
    assert root.visits == total
    assert sum(ch.visits for ch in root.children.values()) == total
    assert set(root.children) == legal_moves(state)


def test_search_rejects_finished_game():
    state = endgame(1, plays=52)
    with pytest.raises(TerminalStateError):
        search(state, zero_evaluator)


def test_last_trick_value_is_exact():
    for seed in (2, 5, 11, 17):
        state = endgame(seed, plays=48)
        probs, value = search(state, zero_evaluator)
        final = state
        while not final.finished:
            final = play(final, sorted(legal_moves(final))[0])
        s = final.scores()
        diff = s.per_team[0] - s.per_team[1]
        mover_sign = 1 if state.to_play % 2 == 0 else -1
        assert value == pytest.approx(mover_sign * diff)


def test_search_avoids_forced_pig_capture():
    # Seat 0 can win the spade trick with SQ (then cannot avoid keeping
    # it) or duck with S2, later discarding SQ on a diamond trick the
    # other team wins.  The right line is worth +100, the wrong -100.
    fs = FastState(hands=[0, 0, 0, 0], piles=[0, 0, 0, 0],
                   trick=cards("S5", "S9", "S4"), trick_leader=1,
                   to_play=0, remaining=5)
    for seat, toks in enumerate((("SQ", "S2"), ("D2",), ("D7",), ("DT",))):
        for t in toks:
            fs.hands[seat] |= 1 << parse_card(t)
    assert minimax(fs) == 100
    probs, value = search(fs, zero_evaluator, count=1000)
    assert probs[parse_card("S2")] >= 0.9
    assert abs(value - 100) <= 5


def test_endgame_values_match_exhaustive_oracle():
    for seed in range(40):
        state = endgame(seed)
        fs = FastState.from_state(state)
        exact = minimax(fs)
        _, value = search(fs, zero_evaluator, count=4000)
        mover_sign = 1 if fs.to_play % 2 == 0 else -1
        assert abs(mover_sign * value - exact) <= 1.0, seed


def test_backed_up_values_stay_in_subtree_range():
    # With an evaluator that returns each leaf's exact game value,
    # every node mean must sit inside its subtree's outcome envelope.
    def exact_evaluator(fs):
        return minimax(fs)

    for seed in (3, 14, 27):
        state = endgame(seed)
        root = search_tree(state, exact_evaluator, count=400)
        stack = [root]
        while stack:
            node = stack.pop()
            if node.visits == 0:
                continue
            outcomes = subtree_outcomes(node.state.copy(), [])
            assert min(outcomes) - 1e-9 <= node.value <= max(outcomes) + 1e-9
            stack.extend(node.children.values())


# ---------------------------------------------------------------------------
# Action selection from visits


def test_sample_from_visits_zero_temperature():
    probs = np.zeros(52)
    probs[[4, 9, 40]] = (0.2, 0.5, 0.3)
    assert sample_from_visits(probs, 0.0, random.Random(0)) == 9


def test_sample_from_visits_unit_temperature_frequencies():
    probs = np.zeros(52)
    probs[[4, 9, 40]] = (0.5, 0.3, 0.2)
    rng = random.Random(42)
    counts = {4: 0, 9: 0, 40: 0}
    n = 10000
    for _ in range(n):
        counts[sample_from_visits(probs, 1.0, rng)] += 1
    for card in counts:
        assert abs(counts[card] / n - probs[card]) < 0.03


def test_mcts_agent_is_legal_and_plays_forced_card():
    net = PolicyValueNet(NetConfig(depth=2, width=16), seed=0)
    agent = MctsAgent(net, SearchConfig.training(), scenarios=2)
    state = endgame(21, plays=48)
    view = state.view(state.to_play)
    assert agent.choose(view, random.Random(1)) in view.legal_moves()


def test_net_evaluator_sign_convention():
    net = PolicyValueNet(NetConfig(depth=2, width=16), seed=3)
    state = deal(5)
    fs = FastState.from_state(state)
    ev = net_evaluator(net)
    raw = net.forward(encode_fast(fs))[1]
    expected = raw if fs.to_play % 2 == 0 else -raw
    assert ev(fs) == pytest.approx(expected)
