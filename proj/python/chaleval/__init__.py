"""Challenge evaluation: segmentation metrics, rankings and ranking stability."""

from ._chaleval import (
    ChalevalError,
    assd,
    bootstrap_stability,
    dice,
    evaluate_challenge,
    generate_challenge,
    kendall_tau,
    ma_mae,
    rank_teams,
    read_label_volume,
    run_cli,
    write_label_volume,
)

__all__ = [
    "ChalevalError",
    "assd",
    "bootstrap_stability",
    "dice",
    "evaluate_challenge",
    "generate_challenge",
    "kendall_tau",
    "ma_mae",
    "rank_teams",
    "read_label_volume",
    "run_cli",
    "write_label_volume",
]
