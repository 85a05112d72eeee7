import sys

from viddial.cli import main

sys.exit(main())
