"""Agent loop that edits molecules through the toolbox."""

from .loop import (
    FINAL_ANSWER,
    AgentConfig,
    Conversation,
    FinalAnswer,
    GenerationRecord,
    Message,
    PolicyError,
    ToolCall,
    agent_gen,
    replay_trace,
)
from .policies import RemoteLLMPolicy, ScriptedPolicy, crossover_site, parse_reply
from .prompts import DEFAULT_GOAL, SYSTEM_PROMPT, initial_prompt, intermediate_prompt
