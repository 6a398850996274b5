import sys

from cdgkit.main import main

sys.exit(main())
