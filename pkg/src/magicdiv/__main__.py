import sys

from magicdiv.cli import main

sys.exit(main())
