import sys

from dagn.cli import main

sys.exit(main())
