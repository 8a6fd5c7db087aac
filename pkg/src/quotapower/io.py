"""File formats: game JSON, power-vector CSV, breakpoint CSV."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Sequence

from .game import Game, PowerVector, as_fraction
from .superincreasing import SIWeights, breakpoints, closed_form, dary_weights


def parse_rational(text) -> Fraction:
    """``"a/b"``, an integer, or a decimal string, parsed exactly."""
    if isinstance(text, dict):
        return Fraction(int(text["num"]), int(text.get("den", 1)))
    try:
        return as_fraction(text.strip() if isinstance(text, str) else text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def quota_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


def game_to_json(game: Game) -> str:
    return json.dumps({"weights": list(game.weights), "quota": quota_json(game.quota)})


def load_game(doc: dict, quota=None) -> Game:
    """Build a game from a JSON document.

    Accepts sampler output (no quota) when ``quota`` is given; an explicit
    ``quota`` argument overrides the document's.
    """
    if "weights" not in doc:
        raise ValueError("game document needs a 'weights' list")
    if quota is None:
        if "quota" not in doc:
            raise ValueError("no quota in the document and none given")
        quota = parse_rational(doc["quota"])
    return Game(tuple(doc["weights"]), as_fraction(quota))


def power_vector_csv(values: PowerVector | Sequence[Fraction]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["agent_index", "value_num", "value_den", "value_float"])
    for i, v in enumerate(values, start=1):
        writer.writerow([i, v.numerator, v.denominator, format(float(v), ".17g")])
    return buf.getvalue()


def load_si_weights(doc) -> SIWeights:
    """Explicit list (any order) or ``{"base": d, "n": n}``."""
    if isinstance(doc, dict):
        if "base" in doc:
            return dary_weights(int(doc["base"]), int(doc["n"]))
        doc = doc["weights"]
    return SIWeights.from_any(int(x) for x in doc)


def breakpoints_csv(weights: SIWeights) -> str:
    n = weights.n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["beta", "pset", "lower_num", "lower_den", "upper_num", "upper_den"]
    for i in range(1, n + 1):
        header += [f"phi_{i}_num", f"phi_{i}_den"]
    writer.writerow(header)
    for iv in breakpoints(weights):
        row = [
            iv.pset.beta,
            ",".join(map(str, iv.pset.members)),
            iv.lower.numerator, iv.lower.denominator,
            iv.upper.numerator, iv.upper.denominator,
        ]
        for i in range(1, n + 1):
            v = closed_form(iv.pset.members, i)
            row += [v.numerator, v.denominator]
        writer.writerow(row)
    return buf.getvalue()
