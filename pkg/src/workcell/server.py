"""Run the gateway as a service: ``python -m workcell.server --port 8080``.

Flags: --port, --scenario <path>, --kb <path>, --robot-model <path>,
--seed <int>.  The scenario file wires the whole cell; --kb and
--robot-model override its choices.  LOG_LEVEL controls verbosity.
If a ``frontend/`` directory with an index.html exists under the working
directory it is served as the operator console at /.
"""
from __future__ import annotations

import argparse
import logging
import os
from dataclasses import replace
from pathlib import Path

from .dialogue import load_kb
from .gateway.http import serve
from .robot import load_model
from .scenarios import build_service, data_path, load_scenario


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="workcell.server", description=__doc__)
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--scenario", default=str(data_path("scenarios", "coffee.json")))
    parser.add_argument("--kb", default=None, help="override the scenario knowledge base")
    parser.add_argument("--robot-model", default=None, help="override the scenario robot model")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario RNG seed")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=os.environ.get("LOG_LEVEL", "INFO").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    config = load_scenario(args.scenario)
    if args.kb:
        config = replace(config, kb=load_kb(args.kb))
    if args.robot_model:
        config = replace(config, model=load_model(args.robot_model))
    if args.seed is not None:
        config = replace(config, seed=args.seed)

    static_dir = None
    console = Path.cwd() / "frontend"
    if (console / "index.html").is_file():
        static_dir = str(console)

    service = build_service(config)
    server, thread = serve(service, port=args.port, host="0.0.0.0", static_dir=static_dir)
    logging.getLogger("workcell").info(
        "scenario %r on port %d%s",
        config.name,
        server.port,
        f", console from {static_dir}" if static_dir else "",
    )
    try:
        thread.join()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        service.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
