"""
Templated soccer-event vocabulary for synthetic commentaries and narration.

Every event has one commentary template and two narration phrasings. Each
narration shares at least three content tokens with its commentary once the
slots are filled. Filler lines share no content token with any event.
"""

from dataclasses import dataclass

import numpy as np

PLAYERS = (
    "Jones", "Smith", "Silva", "Muller", "Rossi", "Dubois", "Novak", "Hansen",
    "Kovac", "Moreno", "Okafor", "Larsen", "Petit", "Berg", "Costa", "Fischer",
)
TEAMS = ("Rovers", "United", "Athletic", "Wanderers")
SIDES = ("left", "right")

# key -> (commentary, (narration, narration))
EVENTS: dict[str, tuple[str, tuple[str, str]]] = {
    "corner": (
        "Corner kick {side} side, {player} swings it in.",
        (
            "{player} takes the corner kick from the {side} side",
            "corner kick on the {side} side now, {player} over the ball",
        ),
    ),
    "yellow_card": (
        "Yellow card for {player} after a late tackle.",
        (
            "the referee shows {player} a yellow card for that late tackle",
            "late tackle by {player} and that is a yellow card",
        ),
    ),
    "goal": (
        "Goal! {player} scores with a low shot past the keeper.",
        (
            "{player} scores! a low shot past the keeper",
            "low shot from {player}, past the keeper, {player} scores",
        ),
    ),
    "substitution": (
        "Substitution for {team}, {player} comes on.",
        (
            "{team} make a substitution, {player} comes on now",
            "change for {team}, substitution made and {player} comes on",
        ),
    ),
    "offside": (
        "{player} of {team} is flagged offside.",
        (
            "{team} attack again but {player} is flagged offside",
            "flagged offside, {player} mistimed the run for {team}",
        ),
    ),
    "foul": (
        "Foul by {player}, free kick to {team} in midfield.",
        (
            "free kick in midfield to {team}, {player} with the foul",
            "{player} commits the foul, {team} get a free kick",
        ),
    ),
    "save": (
        "Great save by the keeper, {player} denied from close range.",
        (
            "what a save, {player} denied from close range by the keeper",
            "{player} from close range but the keeper makes the save",
        ),
    ),
    "header": (
        "{player} heads wide from a {side} side cross.",
        (
            "cross from the {side} side, {player} heads it wide",
            "{player} rises to the cross and heads wide",
        ),
    ),
    "penalty": (
        "Penalty to {team}! {player} is brought down in the box.",
        (
            "penalty! {player} brought down in the box, {team} appeal and get it",
            "{player} brought down inside the box, penalty to {team}",
        ),
    ),
    "injury": (
        "{player} is down injured, play is stopped.",
        (
            "{player} stays down injured and play is stopped",
            "play stopped, {player} looks injured and is down",
        ),
    ),
}

FILLER_LINES = (
    "what an atmosphere here tonight",
    "the crowd are in good voice",
    "both managers watching closely from the touchline",
    "lovely weather for football",
    "attendance today is excellent",
    "patient possession at the back",
    "nothing much happening at the moment",
    "supporters singing loudly behind us",
    "quite a tactical battle so far",
    "still plenty of time remaining",
)


@dataclass(frozen=True)
class PlantedEvent:
    """The event behind one synthetic commentary and its slot values."""

    key: str
    player: str
    team: str
    side: str

    @property
    def slots(self) -> dict[str, str]:
        return {"player": self.player, "team": self.team, "side": self.side}

    def commentary(self) -> str:
        return EVENTS[self.key][0].format(**self.slots)

    def narration(self, variant: int) -> str:
        return EVENTS[self.key][1][variant % 2].format(**self.slots)


def draw_events(rng: np.random.Generator, count: int) -> list[PlantedEvent]:
    keys = list(EVENTS)
    picks = rng.integers(0, [len(keys), len(PLAYERS), len(TEAMS), len(SIDES)], size=(count, 4))
    return [
        PlantedEvent(keys[e], PLAYERS[p], TEAMS[t], SIDES[s]) for e, p, t, s in picks
    ]
