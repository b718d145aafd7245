"""
sweep: plot-ready tables over one parameter.

--param x       w and w' on a probability grid for each --alphas value
--param alpha   re-solve the config with every player's alpha replaced
--param c       re-solve the config with every player's cost replaced
--param d_avg   X at average neighborhood size d_avg and the target d(1 - X)

Rows that fail carry the error in the status column; the command fails
only when no row succeeds.
"""
import logging
from pathlib import Path

import click
import numpy as np
import pandas as pd

from src.commands.models import load_game_config
from src.commands.output import emit_csv, parse_range
from src.services.critical import critical_points
from src.services.errors import NetsecError, ParameterError, SweepError
from src.services.models import GameSpec, PlayerParams
from src.services.total_effort import interior_solve, phi_upper_bound, solve_auto
from src.services.weighting import WeightingSpec, w_eval, w_prime

logger = logging.getLogger(__name__)


def _is_degree_regular(game: GameSpec) -> bool:
    return len(set(game.graph.extended_sizes().tolist())) == 1


def _solve_point(game: GameSpec) -> dict:
    report = interior_solve(game) if _is_degree_regular(game) else None
    if report is None:
        report = solve_auto(game)
    row = {"phi": report.phi, "is_pne": report.is_pne, "method": report.method.value}
    try:
        bound = phi_upper_bound(game)
    except NetsecError as exc:
        logger.debug("no phi bound at this point: %s", exc)
        return row | {"bound_sum": None, "bound_avg": None}
    row |= {"bound_sum": bound.bound_sum, "bound_avg": bound.bound_avg}
    return row


def _replace_players(game: GameSpec, param: str, value: float) -> GameSpec:
    players = []
    for p in game.players:
        if param == "alpha":
            players.append(PlayerParams(c=p.c, L=p.L, weighting=WeightingSpec.prelec(value)))
        else:
            players.append(PlayerParams(c=value, L=p.L, weighting=p.weighting))
    return GameSpec.build(game.graph, players, game.externality)


def _weighting_rows(xs: list[float], alphas: list[float]) -> list[dict]:
    grid = np.asarray(xs, dtype=float)
    rows = []
    for alpha in alphas:
        spec = WeightingSpec.prelec(alpha)
        values, slopes = w_eval(spec, grid), w_prime(spec, grid)
        rows += [
            {"alpha": alpha, "x": x, "w": w, "w_prime": wp, "status": "ok"}
            for x, w, wp in zip(grid, values, slopes)
        ]
    return rows


@click.command("sweep")
@click.argument("config_path", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--param", type=click.Choice(["x", "alpha", "c", "d_avg"]), required=True)
@click.option("--range", "value_range", default=None, help="start:stop:count or a,b,c")
@click.option("--alphas", default="0.4,0.8", show_default=True, help="Curvatures for --param x")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
def sweep_command(config_path: Path | None, param: str, value_range: str | None, alphas: str, out: str | None):
    """Emit a CSV table over the swept parameter."""
    if param == "x":
        xs = parse_range(value_range or "0.01:0.99:99")
        if any(not 0 < x < 1 for x in xs):
            raise ParameterError("--param x needs values in (0, 1)")
        emit_csv(pd.DataFrame(_weighting_rows(xs, parse_range(alphas))), out)
        return

    if config_path is None:
        raise click.UsageError(f"--param {param} needs CONFIG_PATH")
    if value_range is None:
        raise ParameterError("--range is required")
    values = parse_range(value_range)
    game = load_game_config(config_path).to_game()

    rows = []
    for value in values:
        row = {param: value}
        try:
            if param == "d_avg":
                player = game.require_homogeneous("d_avg sweep")
                cp = critical_points(player.weighting, value * player.ratio)
                aggregate = value * (1.0 - cp.x_upper) if cp.interior_exists else None
                row |= {"theta": cp.theta, "x_avg": cp.x_upper, "aggregate": aggregate}
            else:
                row |= _solve_point(_replace_players(game, param, value))
            row["status"] = "ok"
        except (NetsecError, ValueError) as exc:
            logger.warning("%s=%g failed: %s", param, value, exc)
            row["status"] = f"error: {exc}".replace("\n", " ")
        rows.append(row)

    if all(row["status"] != "ok" for row in rows):
        raise SweepError(f"every {param} sweep point failed")
    emit_csv(pd.DataFrame(rows), out)
