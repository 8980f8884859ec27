import os
from pathlib import Path


def output_dir() -> Path:
    out = Path(os.environ.get("DIRACWALK_DEMO_OUT", "demo_output"))
    out.mkdir(parents=True, exist_ok=True)
    return out
