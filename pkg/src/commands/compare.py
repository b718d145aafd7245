"""
compare-weighting: X for two Prelec curvatures across neighborhood sizes.
"""
import logging

import click
import pandas as pd

from src.commands.output import emit_csv, parse_range
from src.services.errors import NetsecError, ParameterError
from src.services.statics import compare_weighting, density_threshold

logger = logging.getLogger(__name__)

COLUMNS = ["d", "theta", "x1", "x2", "xbar", "w_prime_xbar", "regime"]


@click.command("compare-weighting")
@click.option("--alpha1", type=float, required=True, help="Lower Prelec curvature")
@click.option("--alpha2", type=float, required=True, help="Higher Prelec curvature")
@click.option("--c", "c", type=float, required=True, help="Cost per unit of investment")
@click.option("--L", "L", type=float, default=1.0, show_default=True, help="Loss on successful attack")
@click.option("--d", "d_range", default="2..10", show_default=True, help="Neighborhood sizes: a..b, start:stop:count or a,b,c")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
def compare_command(alpha1: float, alpha2: float, c: float, L: float, d_range: str, out: str | None):
    """Classify which curvature yields the lower attack probability for each d."""
    if not 0 < alpha1 < alpha2 < 1:
        raise ParameterError(f"require 0 < alpha1 < alpha2 < 1, got {alpha1}, {alpha2}")
    sizes = parse_range(d_range, integer=True)

    rows = []
    for d in sizes:
        try:
            result = compare_weighting(alpha1, alpha2, d, c, L)
        except NetsecError as exc:
            logger.warning("d=%d skipped: %s", d, exc)
            rows.append({"d": d, "theta": d * c / L, "regime": "undefined"})
            continue
        rows.append({column: getattr(result, column) for column in COLUMNS[:-1]} | {"regime": result.regime.value})

    threshold = density_threshold(alpha1, alpha2, c, L)
    emit_csv(
        pd.DataFrame(rows, columns=COLUMNS),
        out,
        header_lines=[f"density_threshold={threshold if threshold is not None else 'none'}"],
    )
