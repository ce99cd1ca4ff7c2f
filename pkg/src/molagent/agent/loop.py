"""The tool-calling loop that turns two parent molecules into one offspring."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Union

import numpy as np

from ..toolbox import MW_CAP, ToolResult, dispatch, tool_schemas
from .prompts import SYSTEM_PROMPT, initial_prompt, intermediate_prompt

FINAL_ANSWER = "FINAL_ANSWER"


class PolicyError(RuntimeError):
    """The policy could not produce a decision (e.g. endpoint unreachable)."""


@dataclass
class AgentConfig:
    max_steps: int = 10
    max_modifications: int = 3
    mw_cap: float = MW_CAP
    target: str = "target"
    goal: str | None = None
    property_provider: object = None

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.max_modifications < 1:
            raise ValueError("max_modifications must be >= 1")


@dataclass
class ToolCall:
    name: str | None
    arguments: dict | None
    text: str = ""
    call_id: str | None = None
    error: str | None = None  # set when the call was malformed


@dataclass
class FinalAnswer:
    text: str = FINAL_ANSWER


Decision = Union[ToolCall, FinalAnswer]


@dataclass
class Message:
    role: str
    content: str
    tool_calls: list[dict] | None = None
    tool_call_id: str | None = None

    def to_wire(self) -> dict:
        out = {"role": self.role, "content": self.content}
        if self.tool_calls:
            out["tool_calls"] = self.tool_calls
        if self.tool_call_id:
            out["tool_call_id"] = self.tool_call_id
        return out


@dataclass
class Conversation:
    """Message history plus the structured state policies may read."""

    parents: tuple
    config: AgentConfig
    rng: np.random.Generator
    messages: list[Message] = field(default_factory=list)
    step_count: int = 0
    current: str | None = None
    successes: int = 0
    results: list[ToolResult] = field(default_factory=list)

    @property
    def last_result(self) -> ToolResult | None:
        return self.results[-1] if self.results else None

    def add(self, message: Message) -> None:
        self.messages.append(message)

    def wire_messages(self) -> list[dict]:
        return [m.to_wire() for m in self.messages]


class Policy(Protocol):
    def decide(self, conversation: Conversation, tools: list[dict]) -> Decision: ...


@dataclass
class GenerationRecord:
    parents: tuple[str, str]
    tool_trace: list[dict]
    final_smiles: str | None
    failed: bool
    steps: int
    conversation: Conversation | None = field(default=None, repr=False)

    @property
    def n_modifications(self) -> int:
        return sum(1 for t in self.tool_trace if t["status"] == "success")


def _trace_entry(result: ToolResult, step: int, rng_seed: int) -> dict:
    entry = result.to_dict()
    entry["step"] = step
    entry["rng_seed"] = rng_seed
    return entry


def _describe_call(call: ToolCall) -> list[dict]:
    return [{"id": call.call_id, "name": call.name, "arguments": call.arguments if call.arguments is not None else {}}]


def agent_gen(parent1, parent2, policy: Policy, config: AgentConfig | None = None, rng=None) -> GenerationRecord:
    """Run one generation from two scored parents.

    ``rng`` drives both the policy and the seeds handed to randomized tools;
    each tool call's seed is recorded in the trace so it can be replayed.
    """
    config = config or AgentConfig()
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    tool_rng_root = int(rng.integers(2**63))
    policy_rng = np.random.default_rng(int(rng.integers(2**63)))
    conv = Conversation(parents=(parent1, parent2), config=config, rng=policy_rng)
    conv.add(Message("system", SYSTEM_PROMPT))
    conv.add(Message("user", initial_prompt(parent1, parent2, config.target, config.goal, config.property_provider)))
    schemas = tool_schemas()
    trace: list[dict] = []

    while conv.step_count < config.max_steps and conv.successes < config.max_modifications:
        decision = policy.decide(conv, schemas)
        conv.step_count += 1
        if isinstance(decision, FinalAnswer):
            conv.add(Message("assistant", decision.text))
            break
        call_seed = int(np.random.SeedSequence([tool_rng_root, conv.step_count]).generate_state(1, np.uint64)[0] >> 1)
        conv.add(Message("assistant", decision.text, tool_calls=_describe_call(decision)))
        if decision.error is not None or decision.name is None:
            result = ToolResult(
                str(decision.name), dict(decision.arguments or {}), False, message=decision.error or "no tool named"
            )
        else:
            result = dispatch(decision.name, decision.arguments, rng=call_seed, mw_cap=config.mw_cap)
        conv.results.append(result)
        trace.append(_trace_entry(result, conv.step_count, call_seed))
        if result.success:
            conv.current = result.smiles
            conv.successes += 1
        conv.add(
            Message(
                "tool",
                result.to_text() + "\n\n" + intermediate_prompt(conv.current, config.property_provider),
                tool_call_id=decision.call_id,
            )
        )

    return GenerationRecord(
        parents=(parent1.smiles, parent2.smiles),
        tool_trace=trace,
        final_smiles=conv.current,
        failed=conv.current is None,
        steps=conv.step_count,
        conversation=conv,
    )


def replay_trace(trace: list[dict], mw_cap: float = MW_CAP) -> str | None:
    """Re-run every successful call of a trace; return the last output SMILES.

    Raises ``AssertionError`` if any call now gives a different result.
    """
    last = None
    for entry in trace:
        if entry["status"] != "success":
            continue
        result = dispatch(entry["tool"], entry["parameters"], rng=entry["rng_seed"], mw_cap=mw_cap)
        if not result.success or result.smiles != entry["smiles"]:
            raise AssertionError(f"step {entry['step']} ({entry['tool']}) did not reproduce")
        last = result.smiles
    return last
