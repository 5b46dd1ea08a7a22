import sys

from womp.harness.cli import main

sys.exit(main())
