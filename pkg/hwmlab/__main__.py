import sys

from hwmlab.cli import main

sys.exit(main())
