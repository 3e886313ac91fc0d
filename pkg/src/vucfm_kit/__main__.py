import sys

from vucfm_kit.cli import main

sys.exit(main())
