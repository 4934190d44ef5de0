"""Self-play harness: scripted agents at different communication levels."""
from dipcomm.simulator.agents import (
    COMM_LEVELS,
    DEFENSIVE,
    GREEDY,
    GUNBOAT,
    NEGOTIATOR,
    AgentConfig,
    Assignment,
)
from dipcomm.simulator.corpus import CorpusRecord, SampledMessage, load_corpus, sample_random_message
from dipcomm.simulator.engine import BatchConfig, GameConfig, balanced_assignments, render_act, run_batch, run_game
from dipcomm.simulator.log import GameLog, MessageRecord, TurnLog, format_summary, parse_summary

__all__ = [
    "COMM_LEVELS", "DEFENSIVE", "GREEDY", "GUNBOAT", "NEGOTIATOR", "AgentConfig", "Assignment", "BatchConfig",
    "CorpusRecord", "GameConfig", "GameLog", "MessageRecord", "SampledMessage", "TurnLog", "balanced_assignments",
    "format_summary", "load_corpus", "parse_summary", "render_act", "run_batch", "run_game",
    "sample_random_message",
]
