import sys

from pfacorr.cli import main

sys.exit(main())
