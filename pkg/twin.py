import importlib
import logging
import sys

import cyclopts
from cyclopts.exceptions import CycloptsError

from config import setup_logging
from errors import TwinError

logger = logging.getLogger("twin")

EXTENSIONS = (
    "synth.commands",
    "cluster.commands",
    "extract.commands",
    "mesh.commands",
    "metrics.commands",
    "cli.commands",
)


def build_app() -> cyclopts.App:
    app = cyclopts.App(
        name="twin",
        help="Turn a labeled road point cloud into JSON geometry records and meshes.",
    )
    for name in EXTENSIONS:
        importlib.import_module(name).setup(app)
    return app


def main(argv=None) -> int:
    setup_logging()
    app = build_app()
    try:
        app(argv, exit_on_error=False)
    except CycloptsError:
        return 2
    except TwinError as exc:
        print(f"[{exc.stage or 'twin'}] {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        logger.exception("internal failure")
        print(f"[twin] internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
