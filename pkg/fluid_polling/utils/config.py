"""
Configuration management for Fluid Polling
"""

import os
from pathlib import Path
from typing import Dict, Optional
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _int_env(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    return int(value)


class Config:
    """Application configuration"""

    # Output Configuration
    OUTPUT_DIR: Path = Path(os.getenv("FLUID_POLLING_OUTPUT_DIR", "exports"))
    SCHEMA_VERSION: str = "1.0"

    # Application Settings
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Numerics
    DEFAULT_SEED: int = _int_env("FLUID_POLLING_SEED", 20240101)
    TALBOT_NODES: int = _int_env("FLUID_POLLING_TALBOT_NODES", 48)
    WORKERS: int = _int_env("FLUID_POLLING_WORKERS", os.cpu_count() or 1)

    # Simulation budgets per verification command
    BUDGETS: Dict[str, Dict[str, Dict[str, float]]] = {
        "table1": {
            "desk": {"total_time": 2.0e6, "warmup_time": 2.0e4, "batch_count": 100},
            "full": {"total_time": 2.0e8, "warmup_time": 2.0e5, "batch_count": 1000},
        },
        "ecdf": {
            "desk": {"total_time": 1.0e7, "warmup_time": 1.0e5, "batch_count": 20},
            "full": {"total_time": 1.0e8, "warmup_time": 1.0e6, "batch_count": 100},
        },
        "simulate": {
            "desk": {"total_time": 2.0e5, "warmup_time": 2.0e3, "batch_count": 20},
            "full": {"total_time": 2.0e7, "warmup_time": 2.0e5, "batch_count": 1000},
        },
    }

    @classmethod
    def ensure_output_dir(cls, path: Optional[Path] = None) -> Path:
        """Ensure the output directory exists

        Args:
            path: Directory to create; defaults to OUTPUT_DIR

        Returns:
            The directory path
        """
        directory = Path(path) if path is not None else cls.OUTPUT_DIR
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    @classmethod
    def budget(cls, command: str, level: str) -> Dict[str, float]:
        """Look up a desk/full simulation budget"""
        return dict(cls.BUDGETS[command][level])
