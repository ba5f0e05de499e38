import sys

from hhball.cli import main

sys.exit(main())
