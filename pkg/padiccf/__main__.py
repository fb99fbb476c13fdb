import sys

from padiccf.cli import main

sys.exit(main())
