"""
critical-points: V, X, z and the large-neighborhood check for one player type.
"""
import click

from src.commands.output import emit_json
from src.services.critical import check_assumption_largeN, critical_points, solve_z
from src.services.weighting import WeightingSpec


@click.command("critical-points")
@click.option("--alpha", type=float, required=True, help="Prelec curvature in (0, 1)")
@click.option("--c", "c", type=float, required=True, help="Cost per unit of investment")
@click.option("--L", "L", type=float, default=1.0, show_default=True, help="Loss on successful attack")
@click.option("--d", "d", type=click.IntRange(min=1), default=1, show_default=True, help="Extended-neighborhood size")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write JSON here instead of stdout")
def critical_points_command(alpha: float, c: float, L: float, d: int, out: str | None):
    """Solve w'(x) = d*c/L and report x_min, V, X, z and w'(z)."""
    spec = WeightingSpec.prelec(alpha)
    if c <= 0 or L <= 0:
        raise click.BadParameter("c and L must be positive")
    cp = critical_points(spec, d * c / L)
    z = solve_z(spec)
    report = check_assumption_largeN(spec, c, L, d)
    emit_json(
        {
            "alpha": alpha,
            "c": c,
            "L": L,
            "d": d,
            "theta": cp.theta,
            "x_min": cp.x_min,
            "V": cp.v,
            "X": cp.x_upper,
            "interior_exists": cp.interior_exists,
            "tangent": cp.tangent,
            "z": z.z,
            "w_prime_z": z.w_prime_z,
            "assumption3": report.model_dump(mode="json"),
        },
        out,
    )
