import os
from pydantic_settings import BaseSettings
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """Toolkit settings from environment variables"""

    # Project Settings
    PROJECT_NAME: str = "Orbit Tiling Toolkit"
    VERSION: str = "1.0.0"
    SCHEMA_VERSION: int = 1

    # Logging Settings
    LOG_LEVEL: str = os.getenv("RT_LOG", "WARNING")

    # Run Defaults
    DEFAULT_DIM: int = int(os.getenv("RT_DIM", "2"))
    DEFAULT_LEVELS: int = int(os.getenv("RT_LEVELS", "3"))
    DEFAULT_SEED: int = int(os.getenv("RT_SEED", "0"))
    DEFAULT_EPS: str = os.getenv("RT_EPS", "1/2")

    # Numerical Settings
    MONTE_CARLO_SAMPLES: int = int(os.getenv("RT_MONTE_CARLO_SAMPLES", "4000"))
    SCAN_RESOLUTION_DIVISOR: int = 4

    # Back-and-forth Settings
    FRAGMENT_TILES: int = int(os.getenv("RT_FRAGMENT_TILES", "20"))
    FRESH_TILE_BUDGET: int = int(os.getenv("RT_FRESH_TILE_BUDGET", "10000"))

    # Rendering Settings
    SVG_SCALE: float = float(os.getenv("RT_SVG_SCALE", "8"))

    class Config:
        case_sensitive = True
        env_file = ".env"
        extra = "ignore"


# Create settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get toolkit settings"""
    return settings
