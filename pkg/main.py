"""Entry point for PyInstaller builds."""

from src.cli import main

raise SystemExit(main())
