import sys

from annosent.cli import main

sys.exit(main())
