import sys

from rffboot.cli.module import main

sys.exit(main())
