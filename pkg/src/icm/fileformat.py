"""Tournament description files (JSON).

::

    {
      "players": [{"name": "A", "chips": 140}, ...],
      "payouts": [1, 1, 1, 0],
      "bet": {
        "participants": ["A", "B", "C"],
        "outcomes": [{"prob": "1/2", "deltas": {"A": 16, "B": -8, "C": -8}}, ...]
      }
    }

Players listed with zero chips are kept in the document but left out of every
computation.  Probabilities are parsed exactly from ``"p/q"`` strings.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO

from icm.bets import BetSpec, Outcome, validate_bet
from icm.core import ChipStacks, ICMError, PayoutStructure

log = logging.getLogger(__name__)


class TournamentFileError(ICMError):
    def __init__(self, message: str, where: str = "", source: str = "<input>"):
        self.where = where
        self.source = source
        prefix = f"{source}: {where}: " if where else f"{source}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class BetEntry:
    participants: tuple[str, ...]
    outcomes: tuple[tuple[Fraction, tuple[tuple[str, int], ...]], ...]


@dataclass(frozen=True)
class TournamentFile:
    players: tuple[tuple[str, int], ...]
    payouts: tuple
    bet: BetEntry | None = None
    source: str = field(default="<input>", compare=False)

    @property
    def active(self) -> list[tuple[str, int]]:
        return [(name, chips) for name, chips in self.players if chips > 0]

    @property
    def dropped(self) -> list[str]:
        return [name for name, chips in self.players if chips == 0]

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.active]

    @property
    def stacks(self) -> ChipStacks:
        return ChipStacks(tuple(chips for _, chips in self.active))

    @property
    def payout_structure(self) -> PayoutStructure:
        # Eliminated players already hold the bottom places.
        return PayoutStructure(tuple(self.payouts[:len(self.active)]))

    def bet_spec(self) -> BetSpec:
        if self.bet is None:
            raise TournamentFileError("the file has no bet", "bet", self.source)
        index = {name: i for i, name in enumerate(self.names)}
        n = len(index)
        outcomes = []
        for prob, deltas in self.bet.outcomes:
            vec = [0] * n
            for name, d in deltas:
                if name in index:
                    vec[index[name]] = d
            outcomes.append(Outcome(prob, tuple(vec)))
        return BetSpec(frozenset(index[p] for p in self.bet.participants), tuple(outcomes))


def _fail(message, where, source):
    raise TournamentFileError(message, where, source)


def _number(value, where, source):
    if isinstance(value, bool):
        _fail("expected a number", where, source)
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            _fail(f"cannot parse {value!r} as a number", where, source)
    _fail(f"expected a number, got {value!r}", where, source)


def _int(value, where, source):
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"expected an integer, got {value!r}", where, source)
    return value


def parse_tournament(text: str, source: str = "<input>") -> TournamentFile:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise TournamentFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}",
                                  source=source) from exc
    if not isinstance(doc, dict):
        _fail("the document must be a JSON object", "", source)

    raw_players = doc.get("players")
    if not isinstance(raw_players, list):
        _fail("missing list of players", "players", source)
    players = []
    seen = set()
    for k, entry in enumerate(raw_players):
        where = f"players[{k}]"
        if not isinstance(entry, dict):
            _fail("expected an object with name and chips", where, source)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            _fail("missing player name", where + ".name", source)
        if name in seen:
            _fail(f"duplicate player name {name!r}", where + ".name", source)
        seen.add(name)
        chips = _int(entry.get("chips"), where + ".chips", source)
        if chips < 0:
            _fail(f"negative chip count {chips}", where + ".chips", source)
        players.append((name, chips))
    active = [name for name, chips in players if chips > 0]
    dropped = [name for name, chips in players if chips == 0]
    if dropped:
        log.warning("%s: ignoring players with no chips: %s", source, ", ".join(dropped))
    if len(active) < 2:
        _fail("at least 2 players with chips are required", "players", source)

    raw_payouts = doc.get("payouts")
    if not isinstance(raw_payouts, list):
        _fail("missing list of payouts", "payouts", source)
    payouts = tuple(_number(v, f"payouts[{k}]", source) for k, v in enumerate(raw_payouts))
    for k, p in enumerate(payouts):
        if p < 0:
            _fail(f"negative prize {p}", f"payouts[{k}]", source)
    for k in range(len(payouts) - 1):
        if payouts[k] < payouts[k + 1]:
            _fail("payouts must be nonincreasing", f"payouts[{k + 1}]", source)
    if len(payouts) > len(players):
        _fail(f"{len(payouts)} payouts for {len(players)} players", "payouts", source)

    bet = None
    if doc.get("bet") is not None:
        bet = _parse_bet(doc["bet"], {n for n, _ in players}, set(dropped), source)
    tf = TournamentFile(tuple(players), payouts, bet, source)
    if bet is not None:
        check = validate_bet(tf.bet_spec(), tf.stacks)
        if not check.ok:
            _fail("; ".join(str(v) for v in check.violations), "bet", source)
    return tf


def _parse_bet(raw, names: set[str], dropped: set[str], source: str) -> BetEntry:
    if not isinstance(raw, dict):
        _fail("expected an object", "bet", source)
    parts = raw.get("participants")
    if not isinstance(parts, list) or not parts:
        _fail("missing list of participants", "bet.participants", source)
    for k, p in enumerate(parts):
        where = f"bet.participants[{k}]"
        if p not in names:
            _fail(f"unknown player {p!r}", where, source)
        if p in dropped:
            _fail(f"player {p!r} has no chips", where, source)
    if len(set(parts)) != len(parts):
        _fail("duplicate participant", "bet.participants", source)
    raw_outcomes = raw.get("outcomes")
    if not isinstance(raw_outcomes, list) or not raw_outcomes:
        _fail("missing list of outcomes", "bet.outcomes", source)
    outcomes = []
    for k, o in enumerate(raw_outcomes):
        where = f"bet.outcomes[{k}]"
        if not isinstance(o, dict):
            _fail("expected an object with prob and deltas", where, source)
        prob = _number(o.get("prob"), where + ".prob", source)
        deltas = o.get("deltas")
        if not isinstance(deltas, dict):
            _fail("missing deltas object", where + ".deltas", source)
        items = []
        for name, d in deltas.items():
            if name not in names:
                _fail(f"unknown player {name!r}", f"{where}.deltas.{name}", source)
            d = _int(d, f"{where}.deltas.{name}", source)
            if name not in parts and d != 0:
                _fail(f"non-participant {name!r} moves {d} chips", f"{where}.deltas.{name}", source)
            items.append((name, d))
        outcomes.append((Fraction(prob), tuple(items)))
    return BetEntry(tuple(parts), tuple(outcomes))


def parse_tournament_file(path_or_stream: str | Path | IO[str]) -> TournamentFile:
    if isinstance(path_or_stream, (str, Path)):
        path = Path(path_or_stream)
        try:
            text = path.read_text()
        except OSError as exc:
            raise TournamentFileError(str(exc), source=str(path)) from exc
        return parse_tournament(text, str(path))
    return parse_tournament(path_or_stream.read(), getattr(path_or_stream, "name", "<stream>"))


def _json_number(value):
    if isinstance(value, float):
        return value
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def to_document(tf: TournamentFile) -> dict:
    doc = {
        "players": [{"name": name, "chips": chips} for name, chips in tf.players],
        "payouts": [_json_number(p) for p in tf.payouts],
    }
    if tf.bet is not None:
        doc["bet"] = {
            "participants": list(tf.bet.participants),
            "outcomes": [
                {"prob": f"{p.numerator}/{p.denominator}", "deltas": dict(deltas)}
                for p, deltas in tf.bet.outcomes
            ],
        }
    return doc


def serialize_tournament(tf: TournamentFile) -> str:
    return json.dumps(to_document(tf), indent=2) + "\n"
