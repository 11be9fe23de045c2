import sys

from qdcryptpy._cli import main

sys.exit(main())
