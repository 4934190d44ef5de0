from __future__ import annotations

from enum import Enum


class Power(str, Enum):
    """The seven great powers, in the fixed order used for dummy coding."""

    AUS = "AUS"
    ENG = "ENG"
    FRA = "FRA"
    GER = "GER"
    ITA = "ITA"
    RUS = "RUS"
    TUR = "TUR"

    @property
    def full_name(self) -> str:
        return _NAMES[self]

    @property
    def adjective(self) -> str:
        return _ADJECTIVES[self]

    @classmethod
    def parse(cls, text: str) -> "Power":
        key = text.strip().lower()
        try:
            return _LOOKUP[key]
        except KeyError:
            raise ValueError(f"unknown power {text!r}") from None

    def __str__(self) -> str:
        return self.value


POWERS: tuple[Power, ...] = tuple(Power)

_NAMES = {
    Power.AUS: "Austria",
    Power.ENG: "England",
    Power.FRA: "France",
    Power.GER: "Germany",
    Power.ITA: "Italy",
    Power.RUS: "Russia",
    Power.TUR: "Turkey",
}
_ADJECTIVES = {
    Power.AUS: "Austrian",
    Power.ENG: "English",
    Power.FRA: "French",
    Power.GER: "German",
    Power.ITA: "Italian",
    Power.RUS: "Russian",
    Power.TUR: "Turkish",
}
_LOOKUP: dict[str, Power] = {}
for _p in Power:
    _LOOKUP[_p.value.lower()] = _p
    _LOOKUP[_NAMES[_p].lower()] = _p
    _LOOKUP[_ADJECTIVES[_p].lower()] = _p
_LOOKUP["austria-hungary"] = Power.AUS
_LOOKUP["britain"] = Power.ENG
