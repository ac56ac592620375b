"""workcell: a desk-scale simulated collaborative robot cell.

Natural-language commands flow through a conversational form engine,
resolve into pick-and-place jobs via a synthetic vision pipeline, and
execute on a simulated 6-axis arm driven by a small motion-script
language, all orchestrated by an HTTP command gateway.
"""

__version__ = "0.1.0"

from . import dialogue, gateway, robot, scenarios, vision

__all__ = ["dialogue", "gateway", "robot", "scenarios", "vision", "__version__"]
