import sys

from qhmpic.cli import main

sys.exit(main())
