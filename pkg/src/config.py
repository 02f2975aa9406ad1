"""Configuration management for MaskLab."""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# === Script Directory ===
SCRIPT_DIR = Path(__file__).parent

# === Output ===
OUTPUT_DIR = os.getenv("MASKLAB_OUTPUT_DIR", "outputs")
OUTPUT_DIR = os.path.abspath(OUTPUT_DIR) if not os.path.isabs(OUTPUT_DIR) else OUTPUT_DIR

# === Runtime ===
WORKERS = int(os.getenv("MASKLAB_WORKERS", "1"))
LOG_LEVEL = os.getenv("MASKLAB_LOG_LEVEL", "INFO").upper()
ROOT_SEED = int(os.getenv("MASKLAB_ROOT_SEED", "0"))

# === IMD Defaults ===
IMD_STEPS = int(os.getenv("MASKLAB_IMD_STEPS", "5"))
IMD_SAMPLES = int(os.getenv("MASKLAB_IMD_SAMPLES", "5"))
VOTE_TAU = float(os.getenv("MASKLAB_VOTE_TAU", "0.5"))
VOTE_STRATEGY = os.getenv("MASKLAB_VOTE_STRATEGY", "logits_vote").lower()
SEGMENTER_THETA = float(os.getenv("MASKLAB_SEGMENTER_THETA", "0.4"))

# === Shape World Defaults ===
RESOLUTION = int(os.getenv("MASKLAB_RESOLUTION", "64"))
SCENE_COUNT = int(os.getenv("MASKLAB_SCENE_COUNT", "50"))
OCCLUSION_RATE = float(os.getenv("MASKLAB_OCCLUSION_RATE", "0.4"))

# Training-time occluder ranges (fractions of the object bbox)
RECT_RATIO_RANGE = (0.2, 0.9)
SHIFT_RANGE = (0.17, 0.25)

# === Oracle Defaults ===
ORACLE_FIDELITY_BETA = float(os.getenv("MASKLAB_ORACLE_BETA", "0.5"))
ORACLE_BOUNDARY_SIGMA = float(os.getenv("MASKLAB_ORACLE_SIGMA", "1.0"))
ORACLE_ARTIFACT_GAIN = float(os.getenv("MASKLAB_ORACLE_GAIN", "0.15"))

VOTE_STRATEGIES = ("logits_vote", "logits_mean", "mask_vote", "mask_mean")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def validate_config():
    """Validate that environment-driven defaults are in range."""
    errors = []

    if WORKERS < 1:
        errors.append(f"MASKLAB_WORKERS must be >= 1, got {WORKERS}")
    if LOG_LEVEL not in LOG_LEVELS:
        errors.append(f"Unknown MASKLAB_LOG_LEVEL: {LOG_LEVEL}")
    if IMD_STEPS < 1:
        errors.append(f"MASKLAB_IMD_STEPS must be >= 1, got {IMD_STEPS}")
    if IMD_SAMPLES < 1:
        errors.append(f"MASKLAB_IMD_SAMPLES must be >= 1, got {IMD_SAMPLES}")
    if not 0.0 <= VOTE_TAU <= 1.0:
        errors.append(f"MASKLAB_VOTE_TAU must lie in [0, 1], got {VOTE_TAU}")
    if VOTE_STRATEGY not in VOTE_STRATEGIES:
        errors.append(
            f"Unknown MASKLAB_VOTE_STRATEGY: {VOTE_STRATEGY}. Use one of {', '.join(VOTE_STRATEGIES)}"
        )
    if not 0.0 < SEGMENTER_THETA < 1.0:
        errors.append(f"MASKLAB_SEGMENTER_THETA must lie in (0, 1), got {SEGMENTER_THETA}")
    if RESOLUTION < 8:
        errors.append(f"MASKLAB_RESOLUTION must be >= 8, got {RESOLUTION}")
    if SCENE_COUNT < 1:
        errors.append(f"MASKLAB_SCENE_COUNT must be >= 1, got {SCENE_COUNT}")
    if not 0.0 < OCCLUSION_RATE < 1.0:
        errors.append(f"MASKLAB_OCCLUSION_RATE must lie in (0, 1), got {OCCLUSION_RATE}")
    if not 0.0 < ORACLE_FIDELITY_BETA <= 1.0:
        errors.append(f"MASKLAB_ORACLE_BETA must lie in (0, 1], got {ORACLE_FIDELITY_BETA}")
    if ORACLE_BOUNDARY_SIGMA < 0.0:
        errors.append(f"MASKLAB_ORACLE_SIGMA must be >= 0, got {ORACLE_BOUNDARY_SIGMA}")
    if ORACLE_ARTIFACT_GAIN < 0.0:
        errors.append(f"MASKLAB_ORACLE_GAIN must be >= 0, got {ORACLE_ARTIFACT_GAIN}")

    if errors:
        raise ValueError("Configuration errors:\n  - " + "\n  - ".join(errors))


def print_config_summary():
    """Print a summary of the current configuration."""
    print("🔧 Configuration Summary")
    print(f"   Output: {OUTPUT_DIR}")
    print(f"   Workers: {WORKERS}")
    print(f"   IMD: T={IMD_STEPS}, N={IMD_SAMPLES}, vote={VOTE_STRATEGY} (tau={VOTE_TAU})")
    print(f"   Segmenter: theta={SEGMENTER_THETA}")
    print(f"   World: {RESOLUTION}x{RESOLUTION}, scenes={SCENE_COUNT}, occlusion={OCCLUSION_RATE:.0%}")
    print(
        f"   Oracle: beta={ORACLE_FIDELITY_BETA}, sigma={ORACLE_BOUNDARY_SIGMA}, "
        f"gain={ORACLE_ARTIFACT_GAIN}"
    )
