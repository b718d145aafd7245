"""
solve: equilibria for a game configuration.

Total effort games run BRD, Lemke, the interior solve or BRD with LCP
fallback (auto). Weakest link games report the intervals of common
investments; best shot games report one equilibrium per maximal
independent set. Exit status 4 flags a result that failed verification.
"""
import json
import logging
from pathlib import Path

import click
import fnc
import pandas as pd

from src.commands.models import (
    AssumptionSummary,
    BestShotEquilibriumOutput,
    BestShotOutput,
    BoundsOutput,
    GameConfigFile,
    TotalEffortOutput,
    load_game_config,
)
from src.commands.output import emit_json, frame_to_csv, write_text
from src.services.critical import check_assumption_largeN
from src.services.errors import NetsecError
from src.services.lcp import build_lcp, dump_instance, solve_game_lcp
from src.services.models import EquilibriumReport, Externality, GameSpec, Order, StartRule
from src.services.redis import config_digest, load_cached_report, report_key, store_cached_report
from src.services.total_effort import brd_solve, interior_solve, phi_upper_bound, solve_auto
from src.services.wl_bs import best_shot_equilibria, single_player_optimum, verify_wl_bs, weakest_link_equilibria

logger = logging.getLogger(__name__)

VERIFICATION_FAILED = 4
ASSUMPTION_WARNING = "large-neighborhood conditions fail; the best-response characterization is not guaranteed"


class NoEquilibriumFound(click.ClickException):
    exit_code = VERIFICATION_FAILED


# =============================================================================
# Report Builders
# =============================================================================

def assumption_summary(game: GameSpec) -> AssumptionSummary:
    """Large-neighborhood check for every distinct (player, d) pair with curved weighting."""
    pairs = {(game.player(i), game.graph.extended_size(i)) for i in game.graph.nodes}
    ordered = sorted(pairs, key=lambda pair: (pair[1], pair[0].c, pair[0].L, pair[0].weighting.alpha))
    curved = fnc.filter(lambda pair: not pair[0].weighting.is_linear, ordered)
    reports = [check_assumption_largeN(p.weighting, p.c, p.L, d) for p, d in curved]
    holds = all(r.holds for r in reports if r.applicable)
    if not holds:
        logger.warning(ASSUMPTION_WARNING)
    return AssumptionSummary(holds=holds, per_d=reports, warning=None if holds else ASSUMPTION_WARNING)


def total_effort_output(game: GameSpec, report: EquilibriumReport) -> TotalEffortOutput:
    bounds = None
    try:
        bound = phi_upper_bound(game)
        bounds = BoundsOutput(bound_sum=bound.bound_sum, bound_avg=bound.bound_avg, applicable=bound.applicable)
    except NetsecError as exc:
        logger.info("phi bounds unavailable: %s", exc)
    return TotalEffortOutput(
        n=game.n,
        method=report.method.value,
        iterations=report.iterations,
        converged=report.converged,
        is_pne=report.is_pne,
        max_violation=report.max_violation,
        investments=list(report.profile.s),
        attack_probs=report.attack_probs,
        phi=report.phi,
        per_node_case=[case.value for case in report.per_node_case],
        assumption=assumption_summary(game),
        bounds=bounds,
        diagnostics=report.diagnostics,
    )


def _solve_total_effort(game: GameSpec, method: str, order: str, start: str, seed: int | None) -> tuple[dict, bool]:
    if method == "brd":
        report = brd_solve(game, order=Order(order), seed=seed, start=StartRule(start))
    elif method == "lcp":
        report = solve_game_lcp(game)
    elif method == "interior":
        report = interior_solve(game)
        if report is None:
            raise NoEquilibriumFound("no interior equilibrium: the solution of (A+I)s = d(1-X) leaves [0, 1]^n")
    else:
        report = solve_auto(game, order=Order(order), seed=seed, start=StartRule(start))
    return total_effort_output(game, report).model_dump(mode="json"), report.is_pne


def _solve_weakest_link(game: GameSpec) -> tuple[dict, bool]:
    result = weakest_link_equilibria(game)
    payload = {"externality": "weakest_link", "n": game.n, **result.model_dump(mode="json")}
    return payload, all(iv.verified for iv in result.intervals)


def _solve_best_shot(game: GameSpec) -> tuple[dict, bool]:
    player = game.require_homogeneous("best_shot_equilibria")
    optimum = single_player_optimum(player.weighting, player.c, player.L)
    equilibria = []
    for profile in best_shot_equilibria(game):
        check = verify_wl_bs(game, profile)
        equilibria.append(BestShotEquilibriumOutput(
            support=[i for i, v in zip(game.graph.nodes, profile.s) if v > 0],
            investments=list(profile.s),
            is_pne=check.is_pne,
            max_violation=check.max_violation,
        ))
    payload = BestShotOutput(
        n=game.n,
        s_star=optimum.s_star,
        regime=optimum.regime.value,
        tie=optimum.tie,
        equilibria=equilibria,
    )
    return payload.model_dump(mode="json"), all(e.is_pne for e in equilibria)


def to_frame(payload: dict) -> pd.DataFrame:
    """Tabular view of a solve payload."""
    externality = payload["externality"]
    if externality == "total_effort":
        return pd.DataFrame({
            "node": range(1, payload["n"] + 1),
            "investment": payload["investments"],
            "attack_prob": payload["attack_probs"],
            "case": payload["per_node_case"],
        })
    if externality == "weakest_link":
        return pd.DataFrame(payload["intervals"])
    rows = [
        {"equilibrium": k, "node": node, "investment": value}
        for k, eq in enumerate(payload["equilibria"], start=1)
        for node, value in enumerate(eq["investments"], start=1)
    ]
    return pd.DataFrame(rows, columns=["equilibrium", "node", "investment"])


# =============================================================================
# Command
# =============================================================================

@click.command("solve")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--method", type=click.Choice(["brd", "lcp", "interior", "auto"]), default="auto", show_default=True)
@click.option("--order", type=click.Choice([o.value for o in Order]), default=Order.ROUND_ROBIN.value, show_default=True)
@click.option("--start", type=click.Choice([s.value for s in StartRule]), default=StartRule.ZEROS.value, show_default=True)
@click.option("--seed", type=int, default=None, help="Seed for random order or start")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True, path_type=Path), default=None)
@click.option("--cache/--no-cache", default=False, show_default=True, help="Use the redis report cache")
@click.option("--dump-lcp", type=click.Path(dir_okay=False, writable=True, path_type=Path), default=None,
              help="Write the total effort LCP instance as plain text")
@click.pass_context
def solve_command(
    ctx: click.Context,
    config_path: Path,
    method: str,
    order: str,
    start: str,
    seed: int | None,
    fmt: str,
    out: Path | None,
    cache: bool,
    dump_lcp: Path | None,
):
    """Compute and verify equilibria for the game in CONFIG_PATH."""
    config: GameConfigFile = load_game_config(config_path)
    game = config.to_game()

    if dump_lcp is not None:
        if game.externality != Externality.TOTAL_EFFORT:
            raise click.BadParameter("--dump-lcp applies to total effort games", param_hint="--dump-lcp")
        dump_lcp.write_text(dump_instance(build_lcp(game)), encoding="utf-8")

    key = report_key(config_digest(config.normalized()), method, order, start, seed) if cache else None
    cached = load_cached_report(key) if key else None
    if cached is not None:
        payload = json.loads(cached)
        verified = payload.pop("_verified", True)
    else:
        if game.externality == Externality.TOTAL_EFFORT:
            payload, verified = _solve_total_effort(game, method, order, start, seed)
        elif game.externality == Externality.WEAKEST_LINK:
            payload, verified = _solve_weakest_link(game)
        else:
            payload, verified = _solve_best_shot(game)
        if key:
            store_cached_report(key, json.dumps({**payload, "_verified": verified}))

    if fmt == "json":
        emit_json(payload, out)
    else:
        write_text(frame_to_csv(to_frame(payload)), out)

    if not verified:
        click.echo("verification failed: result is not a verified equilibrium", err=True)
        ctx.exit(VERIFICATION_FAILED)
