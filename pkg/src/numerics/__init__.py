# numerics package
from src.numerics.quadrature import integrate_1d, integrate_2d, integrate_cumulative, sum_series
from src.numerics.special_functions import bessel_k_half, bessel_k_half_scaled, f22_tail, log_gamma

__all__ = [
    "integrate_1d",
    "integrate_2d",
    "integrate_cumulative",
    "sum_series",
    "bessel_k_half",
    "bessel_k_half_scaled",
    "f22_tail",
    "log_gamma",
]
