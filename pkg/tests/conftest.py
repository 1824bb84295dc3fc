import os
import sys

# allow running the suite from a fresh checkout before the editable install
sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))
