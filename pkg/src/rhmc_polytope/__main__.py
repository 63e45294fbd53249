import sys

from rhmc_polytope.cli import main

sys.exit(main())
