import os
import sys

# Allow running the test suite from a plain checkout without installing.
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))
