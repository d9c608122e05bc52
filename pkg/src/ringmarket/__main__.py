import sys

from ringmarket.cli import main

sys.exit(main())
