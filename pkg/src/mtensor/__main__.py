import sys

from mtensor.cli import main

sys.exit(main())
