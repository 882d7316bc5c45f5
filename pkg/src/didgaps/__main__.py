import sys

from didgaps.cli import main

sys.exit(main())
