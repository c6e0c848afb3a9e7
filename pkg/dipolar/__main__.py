import sys

from dipolar.main import main

sys.exit(main())
