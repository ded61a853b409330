"""Match results shared by the visual and tactile template matchers."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional


class MatchKind(enum.Enum):
    MATCHED = "matched"
    NOVEL = "novel"
    NO_CONTACT = "no_contact"


@dataclass(frozen=True)
class MatchResult:
    kind: MatchKind
    id: Optional[int]
    distance: float = 0.0

    @classmethod
    def matched(cls, id: int, distance: float) -> "MatchResult":
        return cls(MatchKind.MATCHED, id, distance)

    @classmethod
    def novel(cls, new_id: int, distance: float = float("inf")) -> "MatchResult":
        return cls(MatchKind.NOVEL, new_id, distance)

    @classmethod
    def no_contact(cls) -> "MatchResult":
        return cls(MatchKind.NO_CONTACT, None, 0.0)

    @property
    def is_matched(self) -> bool:
        return self.kind is MatchKind.MATCHED

    @property
    def is_novel(self) -> bool:
        return self.kind is MatchKind.NOVEL
