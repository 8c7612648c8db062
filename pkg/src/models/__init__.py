# models package
from src.models.analytic import AnalyticQuantity, KrishnaiahParams, Method, QuantityName, SeriesEvaluation
from src.models.config import Command, Report, ReportEntry, RunConfig
from src.models.densities import ComplexValue, DensityCase, MillerParams
from src.models.geometry import (
    ConeEvents,
    DihedralAngles,
    Point3,
    ProjectionCoeffs,
    SolidAngles,
    Tetrahedron,
    Triangle,
)
from src.models.quadrature import Domain2D, Interval, QuadratureResult, QuadratureSpec, SeriesResult
from src.models.sampling import EmpiricalDistribution, MCEstimate, SamplerKind, SamplerSpec

__all__ = [
    "AnalyticQuantity",
    "KrishnaiahParams",
    "Method",
    "QuantityName",
    "SeriesEvaluation",
    "Command",
    "Report",
    "ReportEntry",
    "RunConfig",
    "ComplexValue",
    "DensityCase",
    "MillerParams",
    "ConeEvents",
    "DihedralAngles",
    "Point3",
    "ProjectionCoeffs",
    "SolidAngles",
    "Tetrahedron",
    "Triangle",
    "Domain2D",
    "Interval",
    "QuadratureResult",
    "QuadratureSpec",
    "SeriesResult",
    "EmpiricalDistribution",
    "MCEstimate",
    "SamplerKind",
    "SamplerSpec",
]
