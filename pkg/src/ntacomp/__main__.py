import sys

from ntacomp.cli import main

sys.exit(main())
