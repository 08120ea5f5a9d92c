"""
Run a harness subcommand without installing the package, e.g.

    python run_experiment.py identities --seed 3 --out results/identities
"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from hwmlab.cli import main

if __name__ == "__main__":
    sys.exit(main())
