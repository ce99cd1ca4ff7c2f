import json

import httpx
import numpy as np
import pytest

from servers import LLMFixture, serve
from molagent.agent import (
    DEFAULT_GOAL,
    FINAL_ANSWER,
    SYSTEM_PROMPT,
    AgentConfig,
    FinalAnswer,
    PolicyError,
    RemoteLLMPolicy,
    ScriptedPolicy,
    ToolCall,
    agent_gen,
    crossover_site,
    initial_prompt,
    intermediate_prompt,
    parse_reply,
    replay_trace,
)
from molagent.objectives import Scores, ScoredMolecule


def scored(smiles, dG=-7.0, qed=0.6, sa=2.5):
    from molagent.molgraph import parse_smiles

    return ScoredMolecule(parse_smiles(smiles).smiles, Scores(dG, qed, sa))


P1 = scored("CCCCCO")
P2 = scored("NCCCC(=O)O", dG=-5.5)


class Always:
    def __init__(self, decision):
        self.decision = decision
        self.calls = 0

    def decide(self, conv, tools):
        self.calls += 1
        return self.decision


# -- prompts --------------------------------------------------------------------


def test_initial_prompt_contents():
    text = initial_prompt(P1, P2, "EGFR")
    assert "You are encouraged to make a crossover" in text
    assert "[PROTEIN_TARGET]" not in text
    assert text.count("EGFR") == DEFAULT_GOAL.count("[PROTEIN_TARGET]") + 2
    first = text.index("possible attachment points for ligand 1")
    second = text.index("possible attachment points for ligand 2")
    assert first < second
    assert f"1. {P1.smiles}" in text and f"2. {P2.smiles}" in text
    assert "-7.000" in text


def test_intermediate_prompt():
    text = intermediate_prompt("CCO")
    assert "Output FINAL_ANSWER" in text
    assert "Current SMILES: CCO" in text
    assert text.count("possible attachment points") == 1
    assert "Current SMILES" not in intermediate_prompt(None)


def test_system_prompt_first_message():
    rec = agent_gen(P1, P2, ScriptedPolicy(), AgentConfig(), rng=0)
    msgs = rec.conversation.messages
    assert msgs[0].role == "system" and msgs[0].content == SYSTEM_PROMPT
    assert msgs[1].role == "user"


# -- loop -----------------------------------------------------------------------


def test_malformed_policy_fails_after_max_steps():
    policy = Always(ToolCall("add_atom", None, error="tool arguments are not valid JSON"))
    rec = agent_gen(P1, P2, policy, AgentConfig(max_steps=7), rng=1)
    assert rec.failed and rec.steps == 7 and policy.calls == 7
    assert len(rec.tool_trace) == 7
    assert all(t["status"] == "failure" for t in rec.tool_trace)
    assert len(rec.conversation.messages) == 2 + 2 * 7


def test_immediate_final_answer_fails():
    rec = agent_gen(P1, P2, Always(FinalAnswer()), AgentConfig(), rng=2)
    assert rec.failed and rec.final_smiles is None and rec.steps == 1
    assert rec.tool_trace == []


def test_failed_call_does_not_abort():
    class FailThenCross:
        def decide(self, conv, tools):
            if conv.step_count == 0:
                return ToolCall("add_atom", {"mol": "C", "idx": 9, "element": "O", "bond": "single"})
            if conv.step_count == 1:
                return ToolCall("add_atom", {"mol": P1.smiles, "idx": 0, "element": "O", "bond": "single"})
            return FinalAnswer()

    rec = agent_gen(P1, P2, FailThenCross(), AgentConfig(), rng=3)
    assert not rec.failed
    assert [t["status"] for t in rec.tool_trace] == ["failure", "success"]
    assert rec.final_smiles == rec.tool_trace[-1]["smiles"]


def test_max_modifications_stops_loop():
    call = ToolCall("add_atom", {"mol": "CC", "idx": 0, "element": "C", "bond": "single"})
    rec = agent_gen(P1, P2, Always(call), AgentConfig(max_modifications=3), rng=4)
    assert rec.n_modifications == 3 and rec.steps == 3


def test_message_growth_invariant():
    for seed in range(15):
        rec = agent_gen(P1, P2, ScriptedPolicy(), AgentConfig(), rng=seed)
        conv = rec.conversation
        tool_steps = len(rec.tool_trace)
        final = 1 if conv.messages[-1].role == "assistant" else 0
        assert len(conv.messages) == 2 + 2 * tool_steps + final
        assert conv.step_count <= 10


# -- scripted policy ------------------------------------------------------------


def test_crossover_site_path_center():
    assert crossover_site("CCCCC") == 2
    assert crossover_site("c1ccccc1") is None
    assert crossover_site("Cc1ccccc1") is not None


def test_scripted_first_call_is_crossover_at_centres():
    rec = agent_gen(P1, P2, ScriptedPolicy(), AgentConfig(), rng=5)
    first = rec.tool_trace[0]
    assert first["tool"] == "crossover_molecules"
    assert first["parameters"]["idx1"] == crossover_site(P1.smiles)
    assert first["parameters"]["idx2"] == crossover_site(P2.smiles)


def test_scripted_contract(corpus):
    rng = np.random.default_rng(9)
    for _ in range(40):
        a = scored(corpus[int(rng.integers(500))])
        b = scored(corpus[int(rng.integers(500))])
        seed = int(rng.integers(2**31))
        rec = agent_gen(a, b, ScriptedPolicy(), AgentConfig(), rng=seed)
        again = agent_gen(a, b, ScriptedPolicy(), AgentConfig(), rng=seed)
        assert rec.tool_trace == again.tool_trace and rec.final_smiles == again.final_smiles
        assert rec.n_modifications <= 3
        if not rec.failed:
            assert replay_trace(rec.tool_trace) == rec.final_smiles


def test_replay_detects_tampering():
    rec = agent_gen(P1, P2, ScriptedPolicy(), AgentConfig(), rng=6)
    trace = json.loads(json.dumps(rec.tool_trace))
    trace[0]["smiles"] = "C"
    with pytest.raises(AssertionError):
        replay_trace(trace)


# -- reply parsing --------------------------------------------------------------


def test_parse_reply_shapes():
    args = {"mol": "C", "idx": 0, "element": "O", "bond": "single"}
    flat = parse_reply({"content": "x", "tool_calls": [{"name": "add_atom", "arguments": args}]})
    assert isinstance(flat, ToolCall) and flat.error is None and flat.arguments == args
    nested = parse_reply(
        {"choices": [{"message": {"tool_calls": [{"id": "c1", "function": {"name": "add_atom", "arguments": json.dumps(args)}}]}}]}
    )
    assert nested.error is None and nested.call_id == "c1"
    assert isinstance(parse_reply({"content": "ok FINAL_ANSWER"}), FinalAnswer)
    assert parse_reply({"message": {"content": FINAL_ANSWER}}).text == FINAL_ANSWER


@pytest.mark.parametrize(
    "body",
    [
        [],
        {"tool_calls": [{"name": "add_atom", "arguments": "{broken"}]},
        {"tool_calls": [{"name": "add_atom", "arguments": {"mol": "C"}}]},
        {"tool_calls": [{"arguments": {}}]},
        {"tool_calls": ["nope"]},
        {"content": "thinking..."},
    ],
)
def test_parse_reply_malformed(body):
    decision = parse_reply(body)
    assert isinstance(decision, ToolCall) and decision.error


# -- remote policy against fixtures ------------------------------------------------


def test_remote_policy_crossover_fixture():
    with serve(LLMFixture("crossover")) as fx:
        policy = RemoteLLMPolicy(fx.url, api_key="secret", backoff=0)
        rec = agent_gen(P1, P2, policy, AgentConfig(), rng=0)
    assert not rec.failed
    assert rec.tool_trace[0]["tool"] == "crossover_molecules"
    req = fx.requests[0]
    assert req["headers"]["Authorization"] == "Bearer secret"
    body = req["body"]
    assert body["tool_choice"] == "auto" and len(body["tools"]) == 7
    assert body["messages"][0]["role"] == "system"
    # the second request carries the tool result and the intermediate prompt
    second = fx.requests[1]["body"]["messages"]
    assert second[-1]["role"] == "tool" and "Current SMILES" in second[-1]["content"]
    assert second[-2]["tool_calls"][0]["name"] == "crossover_molecules"


def test_remote_policy_final_answer_fixture():
    with serve(LLMFixture("final")) as fx:
        rec = agent_gen(P1, P2, RemoteLLMPolicy(fx.url, backoff=0), AgentConfig(max_steps=10), rng=0)
    assert rec.failed and rec.steps == 1 and len(fx.requests) == 1


def test_remote_policy_malformed_fixture():
    with serve(LLMFixture("malformed")) as fx:
        rec = agent_gen(P1, P2, RemoteLLMPolicy(fx.url, backoff=0), AgentConfig(max_steps=10), rng=0)
    assert rec.failed and rec.steps == 10
    assert all(t["status"] == "failure" for t in rec.tool_trace)
    # the error text is fed back to the model
    last = fx.requests[-1]["body"]["messages"][-1]
    assert last["role"] == "tool" and "failed" in last["content"]


def test_remote_policy_chatter_counts_as_failed_step():
    with serve(LLMFixture("chatter")) as fx:
        rec = agent_gen(P1, P2, RemoteLLMPolicy(fx.url, backoff=0), AgentConfig(max_steps=3), rng=0)
    assert rec.failed and rec.steps == 3


def test_remote_policy_transport_failure():
    def handler(request):
        return httpx.Response(503)

    client = httpx.Client(transport=httpx.MockTransport(handler))
    policy = RemoteLLMPolicy("http://llm.invalid", client=client, max_retries=2, backoff=0)
    with pytest.raises(PolicyError):
        agent_gen(P1, P2, policy, AgentConfig(), rng=0)


def test_remote_policy_needs_url(monkeypatch):
    monkeypatch.delenv("TOOLMOL_LLM_URL", raising=False)
    with pytest.raises(ValueError):
        RemoteLLMPolicy()
    monkeypatch.setenv("TOOLMOL_LLM_URL", "http://x")
    monkeypatch.setenv("TOOLMOL_LLM_KEY", "k")
    policy = RemoteLLMPolicy()
    assert policy.url == "http://x" and policy.api_key == "k"
