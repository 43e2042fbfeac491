"""MiniC: a small deterministic C subset with line-level execution tracing."""

from __future__ import annotations

from dataclasses import dataclass

from .interpreter import ExecConfig, ExecInput, Interpreter, execute
from .normalize import normalize
from .parser import parse
from .scopes import ScopeAnalysis, VariableOccurrence


@dataclass(frozen=True)
class SourceProgram:
    text: str
    problem_id: str = ""

    @property
    def lines(self) -> list[str]:
        return self.text.splitlines()


__all__ = [
    "ExecConfig",
    "ExecInput",
    "Interpreter",
    "ScopeAnalysis",
    "SourceProgram",
    "VariableOccurrence",
    "execute",
    "normalize",
    "parse",
]
