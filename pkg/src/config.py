"""
Run settings loaded from config/settings.yaml.

Environment variable PARKEDTREES_PRECISION_BITS overrides precision.bits.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

PRECISION_ENV_VAR = "PARKEDTREES_PRECISION_BITS"
PROJECT_ROOT = Path(__file__).parent.parent
DEFAULT_SETTINGS_PATH = PROJECT_ROOT / "config" / "settings.yaml"


@dataclass
class Settings:
    """
    Numerical and run settings.

    Attributes:
        precision_bits: Big-float working precision.
        N: Default x-order (outer truncation) of coefficient tables.
        P: Default y-order (inner truncation) of coefficient tables.
        identity_order: Order to which the identity suite is checked.
        oracle_n_max: Largest tree size for brute-force enumeration.
        oracle_budget: Maximum number of (shape, labeling) iterations.
        root_tolerance: Required |x̂'(Y_c)| after root finding.
        marginal_tolerance: |x̂'(rho)| below which a phase is called dilute.
        tuning_tolerance: Criterion tolerance for tuned dilute families.
        asymptotics: Ranges for the asymptotic comparison regimes.
        ialpha_term_budget: Maximum number of terms in an I_alpha series.
        ialpha_tolerance: Relative stopping tolerance for I_alpha.
        mc_samples: Default number of Monte Carlo samples.
        mc_seed: Default Monte Carlo seed.
        mc_workers: Default worker processes.
        mc_chunk_size: Samples per RNG stream.
        mc_max_size: Trees larger than this are counted as censored.
        output_dir: Directory for CSV/JSON outputs.
        log_level: Default logging level name.
    """

    precision_bits: int = 256
    N: int = 64
    P: int = 64
    identity_order: int = 40
    oracle_n_max: int = 7
    oracle_budget: int = 10**9
    root_tolerance: float = 1e-20
    marginal_tolerance: float = 1e-20
    tuning_tolerance: float = 1e-12
    asymptotics: dict = field(default_factory=dict)
    ialpha_term_budget: int = 20000
    ialpha_tolerance: float = 1e-15
    mc_samples: int = 10**6
    mc_seed: int = 42
    mc_workers: int = 1
    mc_chunk_size: int = 100_000
    mc_max_size: int = 12
    output_dir: str = "./data"
    log_level: str = "INFO"

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Settings":
        """
        Load settings from YAML.

        Args:
            path: Path to settings.yaml. If None, uses config/settings.yaml
                relative to the project root.

        Returns:
            Settings with the environment override applied.
        """
        if path is None:
            path = DEFAULT_SETTINGS_PATH
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Settings file not found: {path}")

        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}

        settings = cls.from_dict(raw)
        settings.apply_env()
        logger.debug(f"Loaded settings from {path}")
        return settings

    @classmethod
    def from_dict(cls, raw: dict) -> "Settings":
        """Build settings from the nested YAML structure."""
        try:
            precision = raw.get("precision", {})
            truncation = raw.get("truncation", {})
            identities = raw.get("identities", {})
            oracle = raw.get("oracle", {})
            phase = raw.get("phase", {})
            ialpha = raw.get("ialpha", {})
            mc = raw.get("monte_carlo", {})
            output = raw.get("output", {})
            log_cfg = raw.get("logging", {})
            return cls(
                precision_bits=int(precision.get("bits", 256)),
                N=int(truncation.get("N", 64)),
                P=int(truncation.get("P", 64)),
                identity_order=int(identities.get("order", 40)),
                oracle_n_max=int(oracle.get("n_max", 7)),
                oracle_budget=int(float(oracle.get("budget", 1e9))),
                root_tolerance=float(phase.get("root_tolerance", 1e-20)),
                marginal_tolerance=float(phase.get("marginal_tolerance", 1e-20)),
                tuning_tolerance=float(phase.get("tuning_tolerance", 1e-12)),
                asymptotics=dict(raw.get("asymptotics", {})),
                ialpha_term_budget=int(ialpha.get("term_budget", 20000)),
                ialpha_tolerance=float(ialpha.get("tolerance", 1e-15)),
                mc_samples=int(float(mc.get("samples", 1e6))),
                mc_seed=int(mc.get("seed", 42)),
                mc_workers=int(mc.get("workers", 1)),
                mc_chunk_size=int(float(mc.get("chunk_size", 1e5))),
                mc_max_size=int(mc.get("max_size", 12)),
                output_dir=str(output.get("directory", "./data")),
                log_level=str(log_cfg.get("level", "INFO")),
            )
        except (TypeError, ValueError, AttributeError) as e:
            raise ConfigError(f"Invalid settings: {e}") from e

    def apply_env(self) -> None:
        """Apply environment overrides."""
        value = os.environ.get(PRECISION_ENV_VAR)
        if value:
            try:
                self.precision_bits = int(value)
            except ValueError as e:
                raise ConfigError(f"{PRECISION_ENV_VAR} must be an integer, got {value!r}") from e
            logger.info(f"Precision overridden by environment: {self.precision_bits} bits")
