"""annulus-lab - run with `python -m src`."""

from .cli import main

raise SystemExit(main())
