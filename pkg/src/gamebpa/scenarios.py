"""The worked web-service scenarios. Each bundles ownership declarations and
role views with the strategy terms that get played and the expected run.

Terms use the ASCII syntax of :mod:`gamebpa.syntax`.
"""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import parse_game_decl, parse_term
from .terms import GameDeclaration, Term


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    declaration: str
    views: dict[str, str]
    strategies: tuple[str, ...]  # one per role, in declaration order
    expected: str

    @property
    def game(self) -> GameDeclaration:
        return parse_game_decl(self.declaration)

    def view(self, role: str) -> Term:
        return parse_term(self.views[role])

    def strategy_terms(self) -> list[Term]:
        return [parse_term(s) for s in self.strategies]


SUBMITTING_ORDER = Scenario(
    name="submitting-order",
    declaration="""\
# interface program (P) against the user (O)
players P, O
owner P: start, write, store
owner O: submit, cancel
""",
    views={
        "P": "start . write . (submit . store $ cancel)",
        "O": "start . write . (submit . store + cancel)",
    },
    strategies=(
        "start . write . (submit . store $ cancel)",
        "start . write . submit . store",
    ),
    expected="start . write . submit . store",
)

TRANSACTION = Scenario(
    name="transaction",
    declaration="""\
# database (P) against the user (O)
players P, O
owner P: start, operate, store, rollback
owner O: submit, abort
""",
    views={
        "P": "start . operate . (submit . store $ abort . rollback)",
        "O": "start . operate . (submit . store + abort . rollback)",
    },
    strategies=(
        "start . operate . (submit . store $ abort . rollback)",
        "start . operate . abort . rollback",
    ),
    expected="start . operate . abort . rollback",
)

PURCHASING = Scenario(
    name="purchasing",
    declaration="""\
# composite service (P) against the user agent (O)
players P, O
owner P: start, oTruck, oTrain, oPlane, pOnLine, pOffLine
owner O: shopping, sTruck, sTrain, sPlane
""",
    views={
        "P": "start . shopping . (sTruck . oTruck . pOnLine $ sTrain . oTrain . pOnLine"
             " $ sPlane . oPlane . (pOnLine + pOffLine))",
        "O": "start . shopping . (sTruck . oTruck . pOnLine + sTrain . oTrain . pOnLine"
             " + sPlane . oPlane . (pOnLine $ pOffLine))",
    },
    strategies=(
        "start . shopping . (sTruck . oTruck . pOnLine $ sTrain . oTrain . pOnLine"
        " $ sPlane . oPlane . pOffLine)",
        "start . shopping . sPlane . oPlane . (pOffLine $ pOnLine)",
    ),
    expected="start . shopping . sPlane . oPlane . pOffLine",
)

EXTENDED_PURCHASING = Scenario(
    name="extended-purchasing",
    declaration="""\
# user agent (P1), composite service (P2), air corporation (P3)
players P1, P2, P3
owner P1: shopping, sTruck, sTrain, sPlane
owner P2: start, oTruck, oTrain, oPlane, pOnLine, pOffLine
owner P3: ByCheck, ByBank
""",
    views={
        "P1": "start . shopping . (sTruck . oTruck . pOnLine + sTrain . oTrain . pOnLine"
              " + sPlane . oPlane . (pOnLine $ pOffLine . (ByCheck $ ByBank)))",
        "P2": "start . shopping . (sTruck . oTruck . pOnLine $ sTrain . oTrain . pOnLine"
              " $ sPlane . oPlane . (pOnLine + pOffLine . (ByCheck $ ByBank)))",
        "P3": "start . shopping . (sTruck . oTruck . pOnLine $ sTrain . oTrain . pOnLine"
              " $ sPlane . oPlane . (pOnLine $ pOffLine . (ByCheck + ByBank)))",
    },
    strategies=(
        "start . shopping . sPlane . oPlane . (pOnLine $ pOffLine . (ByCheck $ ByBank))",
        "start . shopping . (sTruck . oTruck . pOnLine $ sTrain . oTrain . pOnLine"
        " $ sPlane . oPlane . pOffLine . (ByCheck $ ByBank))",
        "start . shopping . (sTruck . oTruck . pOnLine $ sTrain . oTrain . pOnLine"
        " $ sPlane . oPlane . (pOnLine $ pOffLine . ByBank))",
    ),
    expected="start . shopping . sPlane . oPlane . pOffLine . ByBank",
)

ALL = (SUBMITTING_ORDER, TRANSACTION, PURCHASING, EXTENDED_PURCHASING)
BY_NAME = {s.name: s for s in ALL}
