"""Decision policies: an offline scripted heuristic and a remote chat-completion client."""

from __future__ import annotations

import json
import os
import time
from functools import lru_cache

import httpx

from ..descriptors import betweenness_centrality
from ..molgraph import parse_cached
from ..toolbox import FUNCTIONAL_GROUPS, dispatch, eligible_cut_bonds, validate_arguments
from .loop import FINAL_ANSWER, Conversation, Decision, FinalAnswer, PolicyError, ToolCall

MUTATION_TOOLS = ("add_atom", "add_functional_group", "replace_atom")
MUTATION_ELEMENTS = ("C", "N", "O", "F", "Cl", "S")


@lru_cache(maxsize=8192)
def crossover_site(smiles: str) -> int | None:
    """Highest-centrality atom with a non-ring bond; ties go to the lowest index."""
    mol = parse_cached(smiles)
    cent = betweenness_centrality(mol)
    best = None
    for i in range(len(mol)):
        if eligible_cut_bonds(mol, i) and (best is None or cent[i] > cent[best]):
            best = i
    return best


class ScriptedPolicy:
    """Deterministic stand-in for a language model.

    The first step crosses the parents at their most central splittable
    atoms.  Each later step either applies one random valence-feasible
    mutation (probability ``p_mutate``) or answers FINAL_ANSWER.  Mutation
    parameters are checked by a dry run so the proposed call succeeds.
    """

    def __init__(self, p_mutate: float = 0.5, max_tries: int = 12):
        self.p_mutate = p_mutate
        self.max_tries = max_tries

    def decide(self, conv: Conversation, tools: list[dict]) -> Decision:
        cfg = conv.config
        last = conv.last_result
        if conv.successes >= cfg.max_modifications or (last is not None and last.warning):
            return FinalAnswer()
        rng = conv.rng
        if conv.step_count == 0:
            p1, p2 = conv.parents
            i1, i2 = crossover_site(p1.smiles), crossover_site(p2.smiles)
            if i1 is not None and i2 is not None:
                args = {"mol1": p1.smiles, "idx1": i1, "mol2": p2.smiles, "idx2": i2}
                return ToolCall("crossover_molecules", args, text=f"Crossover at atoms {i1} and {i2}.")
        if conv.current is not None:
            if rng.random() >= self.p_mutate:
                return FinalAnswer()
            base = conv.current
        else:
            base = conv.parents[0].smiles
        call = self._mutation(base, rng, cfg.mw_cap)
        return call if call is not None else FinalAnswer()

    def _mutation(self, smiles: str, rng, mw_cap: float) -> ToolCall | None:
        mol = parse_cached(smiles)
        n = len(mol)
        with_h = [i for i in range(n) if mol.hydrogens(i) > 0]
        for _ in range(self.max_tries):
            tool = MUTATION_TOOLS[int(rng.integers(len(MUTATION_TOOLS)))]
            if tool == "replace_atom":
                idx = int(rng.integers(n))
                args = {"mol": smiles, "idx": idx, "element": MUTATION_ELEMENTS[int(rng.integers(len(MUTATION_ELEMENTS)))]}
            else:
                if not with_h:
                    continue
                idx = with_h[int(rng.integers(len(with_h)))]
                if tool == "add_atom":
                    element = MUTATION_ELEMENTS[int(rng.integers(len(MUTATION_ELEMENTS)))]
                    args = {"mol": smiles, "idx": idx, "element": element, "bond": "single"}
                else:
                    names = sorted(FUNCTIONAL_GROUPS)
                    group = names[int(rng.integers(len(names)))]
                    args = {"mol": smiles, "idx": idx, "group": group, "bond": "single"}
            if dispatch(tool, args, mw_cap=mw_cap).success:
                return ToolCall(tool, args, text=f"Apply {tool} at atom {args['idx']}.")
        return None


class RemoteLLMPolicy:
    """Client for a chat-completion endpoint with function calling.

    Request: ``{model, messages, tools, tool_choice: "auto"}``.  Accepted
    replies are either ``{content, tool_calls: [{name, arguments}]}`` or the
    ``choices[0].message`` layout with ``function`` entries.  Malformed calls
    come back as a :class:`ToolCall` with ``error`` set, which the loop turns
    into a failed step.
    """

    def __init__(
        self,
        url: str | None = None,
        *,
        api_key: str | None = None,
        model: str = "default",
        timeout: float = 120.0,
        max_retries: int = 3,
        backoff: float = 0.5,
        client: httpx.Client | None = None,
    ):
        url = url or os.environ.get("TOOLMOL_LLM_URL")
        if not url:
            raise ValueError("remote policy needs a URL (argument or TOOLMOL_LLM_URL)")
        self.url = url
        self.api_key = api_key if api_key is not None else os.environ.get("TOOLMOL_LLM_KEY")
        self.model = model
        self.max_retries = max_retries
        self.backoff = backoff
        self._client = client or httpx.Client(timeout=timeout)

    def _post(self, payload: dict) -> dict:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._client.post(self.url, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last = exc
                continue
            if resp.status_code >= 500 or resp.status_code == 429:
                last = PolicyError(f"HTTP {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise PolicyError(f"policy endpoint rejected the request: HTTP {resp.status_code}")
            try:
                return resp.json()
            except ValueError:
                last = PolicyError("response is not JSON")
                continue
        raise PolicyError(f"policy endpoint failed after {self.max_retries + 1} attempts: {last}")

    def decide(self, conv: Conversation, tools: list[dict]) -> Decision:
        payload = {
            "model": self.model,
            "messages": conv.wire_messages(),
            "tools": tools,
            "tool_choice": "auto",
        }
        return parse_reply(self._post(payload))


def parse_reply(body) -> Decision:
    if not isinstance(body, dict):
        return ToolCall(None, None, error="response is not a JSON object")
    message = body
    if isinstance(body.get("choices"), list) and body["choices"]:
        message = body["choices"][0].get("message") or {}
    elif isinstance(body.get("message"), dict):
        message = body["message"]
    content = message.get("content") or ""
    if not isinstance(content, str):
        content = json.dumps(content)
    calls = message.get("tool_calls") or []
    if calls:
        call = calls[0]
        if not isinstance(call, dict):
            return ToolCall(None, None, text=content, error="tool call is not an object")
        fn = call.get("function") if isinstance(call.get("function"), dict) else call
        name = fn.get("name")
        raw = fn.get("arguments")
        call_id = call.get("id")
        if isinstance(raw, str):
            try:
                raw = json.loads(raw)
            except ValueError as exc:
                return ToolCall(name, None, content, call_id, error=f"tool arguments are not valid JSON: {exc}")
        if raw is None:
            raw = {}
        if not isinstance(name, str):
            return ToolCall(None, None, content, call_id, error="tool call has no function name")
        problem = validate_arguments(name, raw)
        if problem:
            return ToolCall(name, raw if isinstance(raw, dict) else None, content, call_id, error=problem)
        return ToolCall(name, raw, content, call_id)
    if FINAL_ANSWER in content:
        return FinalAnswer(content)
    return ToolCall(None, None, content, error="reply contained neither a tool call nor FINAL_ANSWER")
