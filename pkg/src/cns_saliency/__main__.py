import sys

from cns_saliency.cli import main

sys.exit(main())
