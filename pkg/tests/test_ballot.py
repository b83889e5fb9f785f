"""Vote parsing and plurality tally, checked against a naive counting oracle."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from emocouncil.ballot import (
    BallotResult,
    Tie,
    Vote,
    VoteRecord,
    Winner,
    cast_vote,
    parse_vote,
    run_ballot,
    strip_think_spans,
    tally,
)
from emocouncil.config import BallotSettings
from emocouncil.defaults import DEFAULT_PERSONAS
from emocouncil.emotions import EmotionId, UserTurn, init_agents, make_registry
from emocouncil.errors import UnparseableVote
from emocouncil.gateway import Gateway

from conftest import MOCK_MODELS, make_gateway

REGISTRY = make_registry(["Joy", "Sadness", "Fear", "Anger", "Disgust"])
JOY, SADNESS, FEAR, ANGER, DISGUST = REGISTRY
VOTE_TEMPLATE = BallotSettings().vote_template


def naive_leaders(choices, registry):
    """Independent max-count oracle: every emotion sharing the max count."""
    counts = {e: 0 for e in registry}
    for c in choices:
        counts[c] += 1
    best = max(counts.values())
    return {e for e in registry if counts[e] == best}


def votes_for(choices):
    return [Vote(voter=JOY, choice=c, justification="x") for c in choices]


class TestParseVote:
    def test_structured_response(self):
        vote = parse_vote("VOTE: Fear\nJUSTIFICATION: safest guidance", JOY, REGISTRY)
        assert vote == Vote(JOY, FEAR, "safest guidance")

    def test_unstructured_response_is_none(self):
        assert parse_vote("I vote Joy!!", JOY, REGISTRY) is None

    def test_case_insensitive_choice_and_headers(self):
        vote = parse_vote("vote: sadness\nJUSTIFICATION: x", JOY, REGISTRY)
        assert vote.choice == SADNESS

    def test_unknown_emotion_is_none(self):
        assert parse_vote("VOTE: Boredom\nJUSTIFICATION: x", JOY, REGISTRY) is None

    def test_missing_justification_is_none(self):
        assert parse_vote("VOTE: Fear", JOY, REGISTRY) is None

    def test_think_spans_stripped_before_parsing(self):
        raw = "<think>VOTE: Joy\nJUSTIFICATION: draft</think>VOTE: Fear\nJUSTIFICATION: final"
        vote = parse_vote(raw, JOY, REGISTRY)
        assert vote.choice == FEAR
        assert vote.justification == "final"

    def test_trailing_punctuation_tolerated(self):
        vote = parse_vote("VOTE: Anger.\nJUSTIFICATION: y", JOY, REGISTRY)
        assert vote.choice == ANGER


class TestStripThink:
    def test_removes_well_formed_spans(self):
        assert strip_think_spans("a<think>b</think>c") == "ac"

    def test_leaves_plain_text_alone(self):
        assert strip_think_spans("no tags here") == "no tags here"


class TestTally:
    def test_unique_maximum_wins(self):
        result = tally(votes_for([JOY, JOY, FEAR, SADNESS, JOY]), REGISTRY)
        assert result.outcome == Winner(JOY)
        assert result.tally[JOY] == 3
        assert result.tally[FEAR] == 1

    def test_shared_maximum_ties(self):
        result = tally(votes_for([JOY, JOY, FEAR, FEAR, SADNESS]), REGISTRY)
        assert result.outcome == Tie(frozenset({JOY, FEAR}))

    def test_all_distinct_is_full_tie(self):
        result = tally(votes_for(list(REGISTRY)), REGISTRY)
        assert result.outcome == Tie(frozenset(REGISTRY))

    def test_exhaustive_5x5_matches_naive_oracle(self):
        for assignment in itertools.product(REGISTRY, repeat=5):
            result = tally(votes_for(assignment), REGISTRY)
            leaders = naive_leaders(assignment, REGISTRY)
            if len(leaders) == 1:
                assert result.outcome == Winner(next(iter(leaders)))
            else:
                assert result.outcome == Tie(frozenset(leaders))

    def test_zero_votes_collapses_to_registry_tie(self):
        result = tally([], REGISTRY)
        assert result.outcome == Tie(frozenset(REGISTRY))
        assert sum(result.tally.values()) == 0

    def test_unregistered_choice_rejected(self):
        rogue = Vote(JOY, EmotionId("Boredom"), "x")
        with pytest.raises(ValueError):
            tally([rogue], REGISTRY)

    @given(
        st.lists(st.sampled_from(list(REGISTRY)), min_size=0, max_size=12),
        st.randoms(),
    )
    def test_permutation_invariance(self, choices, rng):
        baseline = tally(votes_for(choices), REGISTRY)
        shuffled = list(choices)
        rng.shuffle(shuffled)
        permuted = tally(votes_for(shuffled), REGISTRY)
        assert baseline.tally == permuted.tally
        assert baseline.outcome == permuted.outcome

    @given(st.lists(st.sampled_from(list(REGISTRY)), min_size=1, max_size=12))
    def test_conservation(self, choices):
        result = tally(votes_for(choices), REGISTRY)
        assert sum(result.tally.values()) == len(choices)


class _ScriptedGateway:
    """Gateway stand-in returning canned chat responses."""

    def __init__(self, responses):
        self._responses = list(responses)
        self.calls = 0

    def params_for(self, role, **kw):
        from emocouncil.gateway import GenerationParams

        return GenerationParams(model="scripted", temperature=0.2)

    def chat(self, role, messages, params=None, tags=None):
        from emocouncil.gateway import assistant

        self.calls += 1
        return assistant(self._responses.pop(0))


def make_agents():
    return init_agents(REGISTRY, DEFAULT_PERSONAS)


def full_candidates():
    return {e: f"{e.name.lower()}-answer" for e in REGISTRY}


class TestCastVote:
    def test_mock_backend_votes_parse(self, gateway):
        agents = make_agents()
        record = cast_vote(
            agents[0], full_candidates(), gateway=gateway, template=VOTE_TEMPLATE
        )
        assert record.vote is not None
        assert record.vote.voter == JOY
        assert record.vote.choice == JOY  # the mock votes for its own persona
        assert record.vote.justification

    def test_unparseable_twice_raises(self):
        gateway = _ScriptedGateway(["I vote Joy!!", "still chatting freely"])
        agents = make_agents()
        with pytest.raises(UnparseableVote) as excinfo:
            cast_vote(
                agents[0], full_candidates(), gateway=gateway, template=VOTE_TEMPLATE
            )
        assert gateway.calls == 2
        assert excinfo.value.voter_name == "Joy"
        assert len(excinfo.value.attempts) == 2

    def test_first_attempt_bad_second_good(self):
        gateway = _ScriptedGateway(["nope", "VOTE: Fear\nJUSTIFICATION: risk first"])
        record = cast_vote(
            make_agents()[0],
            full_candidates(),
            gateway=gateway,
            template=VOTE_TEMPLATE,
        )
        assert record.vote.choice == FEAR
        assert len(record.raw_attempts) == 2

    def test_candidates_must_cover_voter(self, gateway):
        incomplete = {e: "text" for e in REGISTRY if e != JOY}
        with pytest.raises(ValueError):
            cast_vote(
                make_agents()[0], incomplete, gateway=gateway, template=VOTE_TEMPLATE
            )

    def test_vote_exchange_not_persisted_to_history(self, gateway):
        agent = make_agents()[0]
        before = len(agent.history)
        cast_vote(agent, full_candidates(), gateway=gateway, template=VOTE_TEMPLATE)
        assert len(agent.history) == before

    def test_prompt_contains_all_candidates(self, mock_backend, gateway):
        cast_vote(
            make_agents()[0],
            full_candidates(),
            gateway=gateway,
            template=VOTE_TEMPLATE,
        )
        prompt = mock_backend.calls[-1].messages[-1].content
        for e in REGISTRY:
            assert f"{e.name}: {e.name.lower()}-answer" in prompt


class TestRunBallot:
    def test_mock_self_votes_tie_all_five(self, gateway):
        records, result = run_ballot(
            make_agents(), full_candidates(), gateway=gateway, template=VOTE_TEMPLATE
        )
        assert len(records) == 5
        assert not any(r.abstained for r in records)
        assert result.outcome == Tie(frozenset(REGISTRY))
        assert all(v.justification for v in result.votes)

    def test_abstentions_excluded_from_tally(self):
        # Fear's gateway responses never parse; everyone else self-votes.
        responses = []
        for e in REGISTRY:
            if e == FEAR:
                responses += ["garbage", "more garbage"]
            else:
                responses += [f"VOTE: {e.name}\nJUSTIFICATION: me"]
        # map by voter via sequential pop is racy under threads; use one agent at a time
        gateway = _ScriptedGateway(responses)
        agents = make_agents()
        records = []
        for agent in agents:
            try:
                records.append(
                    cast_vote(
                        agent,
                        full_candidates(),
                        gateway=gateway,
                        template=VOTE_TEMPLATE,
                    )
                )
            except UnparseableVote as exc:
                records.append(VoteRecord(agent.id, None, "", exc.attempts, 0.0))
        votes = [r.vote for r in records if r.vote is not None]
        result = tally(votes, REGISTRY)
        assert sum(result.tally.values()) == 4
        assert result.tally[FEAR] == 0

    def test_on_record_callback_sees_every_voter(self, gateway):
        seen = []
        run_ballot(
            make_agents(),
            full_candidates(),
            gateway=gateway,
            template=VOTE_TEMPLATE,
            on_record=lambda r: seen.append(r.voter.name),
        )
        assert sorted(seen) == sorted(e.name for e in REGISTRY)
