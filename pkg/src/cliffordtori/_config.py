import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the multistart intersection solver.

    Args:
        residual_tol (float): Largest accepted max-abs residual of the unbiasedness equations.
            Defaults to 1e-12.
        dedup_tol (float): Toroidal max-metric distance (radians) below which two solutions
            are the same point. Defaults to 1e-7.
        jacobian_tol (float): Frame determinants with smaller modulus mark a non-transversal
            point (index 0). Defaults to 1e-8.
        merge_tol (float): Solutions closer than this are merged into one degenerate point.
            Defaults to 1e-4.
        starts_per_round (int): Newton starts per round. Defaults to 128.
        min_rounds (int): Rounds always run before stability is judged. Defaults to 3.
        max_rounds (int): Round budget. Defaults to 30.
        max_newton_iter (int): Newton iterations per start. Defaults to 100.
        max_halvings (int): Step halvings tried before a start is declared stalled.
            Defaults to 30.
        continuum_min_points (int): A solution set with more non-transversal clusters than
            this is classified as a continuum. Defaults to 50.
        seed (int): Seed of the random start fills. Defaults to 0.

    Example:
        >>> import cliffordtori
        >>> cfg = cliffordtori.SolverConfig(seed=7)
        >>> cfg.replace(starts_per_round=256).starts_per_round
        256

    """

    residual_tol: float = 1e-12
    dedup_tol: float = 1e-7
    jacobian_tol: float = 1e-8
    merge_tol: float = 1e-4
    starts_per_round: int = 128
    min_rounds: int = 3
    max_rounds: int = 30
    max_newton_iter: int = 100
    max_halvings: int = 30
    continuum_min_points: int = 50
    seed: int = 0

    def __post_init__(self):
        for name in ("residual_tol", "dedup_tol", "jacobian_tol", "merge_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in (
            "starts_per_round",
            "min_rounds",
            "max_rounds",
            "max_newton_iter",
            "max_halvings",
            "continuum_min_points",
        ):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.merge_tol < self.dedup_tol:
            raise ValueError("merge_tol must not be smaller than dedup_tol")
        if self.min_rounds > self.max_rounds:
            raise ValueError("min_rounds must not exceed max_rounds")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)
