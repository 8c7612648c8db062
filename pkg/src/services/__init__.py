# services package
from src.services.analytic import constant, krishnaiah_joint_tail, krishnaiah_mc_tail, lambda_k
from src.services.events import EVENTS, resolve_event
from src.services.reporting import ReportBuilder, density_table, render
from src.services.sampling import MonteCarloService, draw_batch, sample
from src.services.validation import ValidationSuite

__all__ = [
    "constant",
    "krishnaiah_joint_tail",
    "krishnaiah_mc_tail",
    "lambda_k",
    "EVENTS",
    "resolve_event",
    "ReportBuilder",
    "density_table",
    "render",
    "MonteCarloService",
    "draw_batch",
    "sample",
    "ValidationSuite",
]
