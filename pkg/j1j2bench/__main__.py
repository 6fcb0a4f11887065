import sys

from j1j2bench.main import main

sys.exit(main())
