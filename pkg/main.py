import logging
logging.basicConfig(level=logging.INFO)

from dotenv import load_dotenv
load_dotenv()

import sys
from Regnet.app import cli_main

sys.exit(cli_main())
