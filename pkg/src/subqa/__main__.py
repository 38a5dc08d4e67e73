import sys

from subqa.cli import main

sys.exit(main())
