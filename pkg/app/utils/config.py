from pydantic_settings import BaseSettings
from pydantic import field_validator


class Settings(BaseSettings):
    # Core Environment
    environment: str = "development"
    debug: bool = False
    host: str = "0.0.0.0"
    port: int = 8010

    # Algebra Configuration
    codim: int = 1
    degree_cap: int = 3
    tail_cap: int = 2  # longest Delta tail enumerated by basis sweeps

    # Formal Jet Configuration
    eps_order: int = 4
    x_degree_cap: int = 8

    # Quadrature Configuration
    quad_nodes: int = 64  # Gauss-Legendre nodes per panel and axis
    quad_panels: int = 4
    quad_tolerance: float = 1e-6
    quad_drift_tolerance: float = 1e-8
    trace_box_x: float = 2.0
    trace_box_y_min: float = 0.25
    trace_box_y_max: float = 4.0
    newton_tolerance: float = 1e-14

    # Relative Cochains
    relative_degree_cap: int = 3

    # Randomized Verification
    seed: int = 0

    # Output Configuration
    output_format: str = "text"  # text | json

    # Logging Configuration
    log_level: str = "INFO"
    log_payload_limit: int = 160

    model_config = {
        "env_prefix": "HOPFCYCLIC_",
        "env_file": ".env",
        "case_sensitive": False,
        "extra": "ignore",
    }

    @field_validator("codim", "degree_cap", "eps_order", "relative_degree_cap")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("output_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in ("text", "json"):
            raise ValueError("output_format must be 'text' or 'json'")
        return value


# Global settings instance
_settings = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
