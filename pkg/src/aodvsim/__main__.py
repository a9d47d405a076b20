import sys

from aodvsim.cli import main

sys.exit(main())
