# config/
import os


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    if value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    return value


# ---------------------- Environment ----------------------
PRECISION_SAMPLES: int = _env_int("HEATTRACE_PRECISION_SAMPLES", 64)
LOG_LEVEL: str = os.getenv("HEATTRACE_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT: str = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# ---------------------- Special functions ----------------------
HURWITZ_MIN_HEAD: int = 15
HURWITZ_EM_ORDER: int = 12          # Bernoulli corrections B_2 .. B_24
HURWITZ_MAX_DENOMINATOR: int = 128  # rational alpha reflected through the Hurwitz formula
HURWITZ_TAYLOR_TERMS: int = 400     # recentring series for any other alpha left of Re s = 0
THETA_TAIL: float = 1e-17

# ---------------------- Spectrum validation ----------------------
VALIDATION_PREFIX: int = 10_000

# ---------------------- Direct summation ----------------------
SUM_FIRST_CHUNK: int = 256
SUM_CHUNK: int = 1 << 16
SUM_MAX_TERMS: int = 200_000_000
HEAT_TOL: float = 1e-12
ZETA_TOL: float = 1e-12
ZETA_MARGIN: float = 0.1
ZETA_EM_TERMS: int = 8
ZETA_EM_MIN_HEAD: int = 64
ZETA_BINOMIAL_RHO: float = 0.25
ABSCISSA_INDEX_COUNT: int = max(100_000, PRECISION_SAMPLES)
MELLIN_EPSREL: float = 1e-8
MELLIN_DECAY: float = 1e-14

# ---------------------- Continuation ----------------------
CANCELLATION_THRESHOLD: float = 1e-12
BINOMIAL_RHO: float = 0.5
BINOMIAL_MAX_TERMS: int = 400
DEFAULT_REGION_R: float = 12.0
DEFAULT_REGION_Y: float = 80.0
CAUCHY_POINTS: int = 256
CAUCHY_CHECK_POINTS: int = 512
CAUCHY_MIN_RADIUS: float = 1e-6
POLE_MATCH: float = 1e-9
GROWTH_MARGIN: float = 0.1
MAX_GROWTH_TRUNCATION: int = 32

# ---------------------- Expansion ----------------------
FIT_Y_MIN: float = 1.0
FIT_Y_MAX: float = 1e3
FIT_SAMPLES: int = PRECISION_SAMPLES
FIT_SMALL_Y: tuple = (0.05, 0.25, 0.5, 0.75)
FIT_SLACK: float = 0.05
FIT_EPS_GRID: int = 41
LINE_POLE_GAP: float = 0.1
REMAINDER_TAIL: float = 1e-14
REMAINDER_Y_CAP: float = 2000.0
MIN_RADIUS_BOUNDS: int = 8
DIVERGENCE_ORDERS: int = 24
DIVERGENCE_SAMPLE_T: tuple = (0.1, 1.0)
DEFAULT_STRIPS: int = 8

# ---------------------- Tauberian ----------------------
TAUBERIAN_TIMES: tuple = (1e-4, 1e-8, 1e-12)
SLOW_VARIATION_FACTORS: tuple = (1.5, 3.0)
SLOW_VARIATION_TOL: float = 0.1
LACUNARY_SAMPLES: int = 12

# ---------------------- CLI ----------------------
JSON_DIGITS: int = 17
EXIT_OK: int = 0
EXIT_ERROR: int = 1
EXIT_NO_CONTINUATION: int = 2
