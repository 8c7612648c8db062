"""
Run the gtet command line from a source checkout, without installing the package.

    python run_app.py validate --scale quick
"""
from src.cli import main

if __name__ == "__main__":
    main()
