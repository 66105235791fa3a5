import sys

from statsp.cli import main

sys.exit(main())
