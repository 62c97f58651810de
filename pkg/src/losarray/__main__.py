import sys

from losarray.cli import main

sys.exit(main())
