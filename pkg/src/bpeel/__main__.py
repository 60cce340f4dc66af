import sys

from bpeel.cli import main

sys.exit(main())
