"""Entry point for ``python -m prescomplex``."""

from prescomplex.cli import main

if __name__ == "__main__":
    main()
